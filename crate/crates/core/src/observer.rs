//! Damped observer and inter-sample output predictor.
//!
//! Inside the absorbing set the observer is the local Luenberger-type
//! observer `f(z, u) + L(h(z) - y)`. Above the absorbing level a damping
//! term along `grad V(z)` removes any growth of `V(z)` beyond `-W(z)` once
//! `V(z) >= b`; between `a` and `b` the output injection is phased in by the
//! blending ramp `p`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AssumptionData, PlantModel, Vector};

/// Gradients below this norm above the absorbing level are refused.
pub const GRADIENT_FLOOR: f64 = 1e-12;

/// Piecewise-linear ramp: 0 below `a`, 1 above `b`, linear in between.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlendingFn {
    lower: f64,
    upper: f64,
}

impl BlendingFn {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite() && lower < upper) {
            return Err(Error::config(format!(
                "blending levels need a < b, got a = {lower}, b = {upper}"
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn eval(&self, s: f64) -> f64 {
        if s <= self.lower {
            0.0
        } else if s >= self.upper {
            1.0
        } else {
            (s - self.lower) / (self.upper - self.lower)
        }
    }
}

pub fn blend_p(s: f64, blend: &BlendingFn) -> f64 {
    blend.eval(s)
}

/// Whether the damping term of the observer correction is active.
/// `Off` exists for ablation studies only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Damping {
    #[default]
    Full,
    Off,
}

/// `max(0, grad V(z) f(z,u) + W(z) + p(V(z)) grad V(z) L (h(z) - y))`.
pub fn phi(plant: &PlantModel, assm: &AssumptionData, blend: &BlendingFn, z: &Vector, y: &Vector, u: &Vector) -> f64 {
    let grad = assm.grad_v(z);
    let injection = assm.gain() * (plant.h(z) - y);
    let inner = grad.dot(&plant.f(z, u)) + assm.w(z) + blend.eval(assm.v(z)) * grad.dot(&injection);
    inner.max(0.0)
}

/// Observer correction `k^(z, y, u)` with the damping term enabled.
pub fn observer_correction(
    plant: &PlantModel,
    assm: &AssumptionData,
    blend: &BlendingFn,
    z: &Vector,
    y: &Vector,
    u: &Vector,
) -> Result<Vector> {
    observer_correction_with(plant, assm, blend, z, y, u, Damping::Full)
}

pub fn observer_correction_with(
    plant: &PlantModel,
    assm: &AssumptionData,
    blend: &BlendingFn,
    z: &Vector,
    y: &Vector,
    u: &Vector,
    damping: Damping,
) -> Result<Vector> {
    let injection = assm.gain() * (plant.h(z) - y);
    let level = assm.v(z);
    if level <= assm.constants().absorbing_level || damping == Damping::Off {
        return Ok(injection);
    }
    let grad = assm.grad_v(z);
    let norm = grad.norm();
    if norm < GRADIENT_FLOOR {
        return Err(Error::DegenerateGradient { level, norm });
    }
    let damp = phi(plant, assm, blend, z, y, u) / grad.norm_squared();
    Ok(injection - grad * damp)
}

/// Observer vector field `f(z, u) + k^(z, w, u)` with the delayed input.
pub fn observer_rhs(
    plant: &PlantModel,
    assm: &AssumptionData,
    blend: &BlendingFn,
    z: &Vector,
    w: &Vector,
    u_delayed: &Vector,
) -> Result<Vector> {
    Ok(plant.f(z, u_delayed) + observer_correction(plant, assm, blend, z, w, u_delayed)?)
}

/// Inter-sample predictor field `jac h(z) f(z, u)`.
pub fn isp_rhs(plant: &PlantModel, z: &Vector, u_delayed: &Vector) -> Vector {
    plant.jac_h(z) * plant.f(z, u_delayed)
}

/// Reset of the inter-sample predictor to a fresh measurement.
pub fn isp_reset(y_sample: &Vector) -> Vector {
    y_sample.clone()
}
