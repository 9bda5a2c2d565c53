//! Sampled-data output feedback for nonlinear plants with measurement and
//! input delays.
//!
//! The closed loop chains four pieces: an inter-sample output predictor
//! that bridges the gaps between delayed measurements, a damped observer
//! with an absorbing sublevel set, an Euler predictor that advances the
//! estimate across the total delay, and a locally stabilizing feedback
//! applied through a zero-order hold.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod controller;
pub mod error;
pub mod history;
pub mod model;
pub mod observer;
pub mod planar;
pub mod predictor;
pub mod schedule;
pub mod simulator;
pub mod trajectory;
pub mod verification;

pub use error::{Error, Result};
pub use history::{InputHistory, StateHistory};
pub use model::{
    AssumptionConstants, AssumptionData, AssumptionFns, Dynamics, FnDynamics, InputBox, Matrix, PlantModel, Vector,
};
pub use observer::{BlendingFn, Damping};
pub use schedule::{generate_partition, SamplingPartition, SimConfig};
pub use simulator::{simulate_closed_loop, InitialData, InitialState};
pub use trajectory::{DecayCriterion, RunSummary, Trajectory};
