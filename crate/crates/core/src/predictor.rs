//! Repeated explicit Euler prediction over the delay horizon `r + tau`.
//!
//! Starting from an estimate of `x(t - r)`, the predictor advances `N` Euler
//! steps of length `(r + tau) / N` driven by the recorded inputs on
//! `[t - r - tau, t)`. Each step integrates the piecewise-constant input
//! exactly, segment by segment.

use crate::error::{Error, Result};
use crate::history::InputHistory;
use crate::model::{AssumptionData, PlantModel, Vector};

/// All Euler iterates `x_0, ..., x_N` for a prediction made at `t_now`.
pub fn euler_iterates(
    plant: &PlantModel,
    x0: &Vector,
    hist: &InputHistory,
    t_now: f64,
    steps: usize,
) -> Result<Vec<Vector>> {
    if steps < 1 {
        return Err(Error::config("predictor step count N must be at least 1"));
    }
    let horizon = plant.total_delay();
    if horizon == 0.0 {
        return Ok(vec![x0.clone()]);
    }
    let start = t_now - horizon;
    let h = horizon / steps as f64;
    let node = |i: usize| match i {
        0 => start,
        i if i == steps => t_now,
        i => start + i as f64 * h,
    };
    let mut iterates = Vec::with_capacity(steps + 1);
    iterates.push(x0.clone());
    let mut x = x0.clone();
    for i in 0..steps {
        let mut increment = Vector::zeros(x.len());
        for (dt, u) in hist.pieces(node(i), node(i + 1))? {
            increment.axpy(dt, &plant.f(&x, u), 1.0);
        }
        x += increment;
        iterates.push(x.clone());
    }
    Ok(iterates)
}

/// `Phi_N(x0, u)`: the predicted state `r + tau` ahead of the estimate `x0`.
///
/// With `r + tau = 0` this returns `x0` unchanged.
pub fn euler_predict(plant: &PlantModel, x0: &Vector, hist: &InputHistory, t_now: f64, steps: usize) -> Result<Vector> {
    Ok(euler_iterates(plant, x0, hist, t_now, steps)?.pop().unwrap())
}

/// True iff every Euler iterate stays in `S2 = {V <= b}`.
pub fn predict_in_set(
    plant: &PlantModel,
    assm: &AssumptionData,
    x0: &Vector,
    hist: &InputHistory,
    t_now: f64,
    steps: usize,
) -> Result<bool> {
    let b = assm.constants().blend_upper;
    Ok(euler_iterates(plant, x0, hist, t_now, steps)?
        .iter()
        .all(|x| assm.v(x) <= b))
}
