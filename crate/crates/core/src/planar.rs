//! Built-in planar example.
//!
//! ```text
//! x1' = zeta x1 - 10 x1^3 + x2
//! x2' = -13/4 x2 + u(t - tau)
//! y   = x1(t - r),   u in [-50 zeta sqrt 2, 50 zeta sqrt 2]
//! ```
//!
//! with `V = |x|^2 / 2`, `R = 1`, `W = V / 4`, a quadratic `P`, the cubic local
//! controller `k~`, `Q = I`, `L = -(2 zeta, 1)'`, `omega = zeta`. The
//! closed forms below are written out independently of the generic code
//! paths and serve as cross-check oracles for them.

use std::sync::Arc;

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::history::InputHistory;
use crate::model::{
    AssumptionConstants, AssumptionData, AssumptionFns, Dynamics, InputBox, Matrix, PlantModel, Vector,
};
use crate::observer::BlendingFn;

/// Default upper blending level `b`.
pub const DEFAULT_B: f64 = 1.5;
/// Default fraction `c`.
pub const DEFAULT_C: f64 = 0.5;
/// Default `zeta`.
pub const DEFAULT_ZETA: f64 = 0.01;

/// `25001 zeta^2 + 2 zeta <= 4`.
pub fn zeta_bound_holds(zeta: f64) -> bool {
    25001.0 * zeta * zeta + 2.0 * zeta <= 4.0
}

/// Input bound `50 zeta sqrt 2`.
pub fn input_bound(zeta: f64) -> f64 {
    50.0 * zeta * std::f64::consts::SQRT_2
}

/// Smallest admissible lower blending level `a`.
pub fn blend_lower_level(zeta: f64) -> f64 {
    let z2 = zeta * zeta;
    1f64.max(10008.0 / 17.0 * z2).max(1251.0 * z2 + 221.0 / 640.0)
}

/// Coefficient `2 / (zeta (13 - 4 zeta))` of `P`.
fn p_weight(zeta: f64) -> f64 {
    2.0 / (zeta * (13.0 - 4.0 * zeta))
}

/// Symmetric matrix `M` with `P(x) = x' M x`.
pub fn p_form(zeta: f64) -> Matrix {
    let alpha = p_weight(zeta);
    Matrix::from_row_slice(
        2,
        2,
        &[
            0.5 + 4.0 * alpha * zeta * zeta,
            2.0 * alpha * zeta,
            2.0 * alpha * zeta,
            alpha,
        ],
    )
}

/// Plant vector field and output.
#[derive(Debug, Clone, Copy)]
pub struct PlanarPlant {
    pub zeta: f64,
}

impl Dynamics for PlanarPlant {
    fn state_dim(&self) -> usize {
        2
    }
    fn input_dim(&self) -> usize {
        1
    }
    fn output_dim(&self) -> usize {
        1
    }
    fn vector_field(&self, x: &Vector, u: &Vector) -> Vector {
        let (x1, x2) = (x[0], x[1]);
        Vector::from_vec(vec![self.zeta * x1 - 10.0 * x1 * x1 * x1 + x2, -3.25 * x2 + u[0]])
    }
    fn output(&self, x: &Vector) -> Vector {
        Vector::from_element(1, x[0])
    }
    fn output_jacobian(&self, _x: &Vector) -> Matrix {
        Matrix::from_row_slice(1, 2, &[1.0, 0.0])
    }
}

/// `V`, `W`, `P` and the unsaturated local controller.
#[derive(Debug, Clone, Copy)]
pub struct PlanarAssumptions {
    pub zeta: f64,
}

impl AssumptionFns for PlanarAssumptions {
    fn lyapunov(&self, x: &Vector) -> f64 {
        0.5 * (x[0] * x[0] + x[1] * x[1])
    }
    fn lyapunov_gradient(&self, x: &Vector) -> Vector {
        x.clone()
    }
    fn dissipation(&self, x: &Vector) -> f64 {
        self.lyapunov(x) / 4.0
    }
    fn local_lyapunov(&self, x: &Vector) -> f64 {
        let s = x[1] + 2.0 * self.zeta * x[0];
        0.5 * x[0] * x[0] + p_weight(self.zeta) * s * s
    }
    fn local_lyapunov_gradient(&self, x: &Vector) -> Vector {
        let alpha = p_weight(self.zeta);
        let s = x[1] + 2.0 * self.zeta * x[0];
        Vector::from_vec(vec![x[0] + 4.0 * alpha * self.zeta * s, 2.0 * alpha * s])
    }
    fn local_control(&self, x: &Vector) -> Vector {
        let z = self.zeta;
        let x1 = x[0];
        Vector::from_element(1, -0.75 * z * (13.0 - 4.0 * z) * x1 + 20.0 * z * x1 * x1 * x1)
    }
}

/// Builds the example with delays `r = tau = 0` (use
/// [`PlantModel::with_delays`] to add them).
pub fn build_planar_example(zeta: f64, b: f64, c: f64) -> Result<(PlantModel, AssumptionData, BlendingFn)> {
    if !(zeta > 0.0) {
        return Err(Error::config(format!("zeta must be positive, got {zeta}")));
    }
    if !zeta_bound_holds(zeta) {
        return Err(Error::config(format!(
            "zeta = {zeta} violates the admissibility bound 25001*zeta^2 + 2*zeta <= 4 (value {})",
            25001.0 * zeta * zeta + 2.0 * zeta
        )));
    }
    build_planar_example_unchecked(zeta, b, c)
}

/// Same as [`build_planar_example`] without the bound on `zeta`; used to
/// construct counterexamples.
pub fn build_planar_example_unchecked(zeta: f64, b: f64, c: f64) -> Result<(PlantModel, AssumptionData, BlendingFn)> {
    if !(zeta > 0.0 && zeta < 3.25) {
        return Err(Error::config(format!("zeta must lie in (0, 13/4), got {zeta}")));
    }
    let a = blend_lower_level(zeta);
    if !(b > a) {
        return Err(Error::config(format!("b must exceed a = {a}, got {b}")));
    }
    let plant = PlantModel::new(
        Arc::new(PlanarPlant { zeta }),
        InputBox::symmetric(1, input_bound(zeta))?,
        0.0,
        0.0,
    )?;
    let lambda_min = SymmetricEigen::new(p_form(zeta)).eigenvalues.min();
    let constants = AssumptionConstants {
        absorbing_level: 1.0,
        blend_lower: a,
        blend_upper: b,
        rate_fraction: c,
        observer_rate: zeta,
        control_rate: zeta * lambda_min,
        p_lower_bound: lambda_min,
    };
    let assm = AssumptionData::new(
        &plant,
        Arc::new(PlanarAssumptions { zeta }),
        Matrix::from_column_slice(2, 1, &[-2.0 * zeta, -1.0]),
        Matrix::identity(2, 2),
        constants,
    )?;
    let blend = BlendingFn::new(a, b)?;
    Ok((plant, assm, blend))
}

/// Closed-form damping term of the example.
pub fn planar_phi_closed_form(z: &Vector, y: f64, u: f64, zeta: f64, blend: &BlendingFn) -> f64 {
    let (z1, z2) = (z[0], z[1]);
    let level = (z1 * z1 + z2 * z2) / 2.0;
    let inner = (zeta + 0.125 - 10.0 * z1 * z1) * z1 * z1 + (z1 + u) * z2
        - 3.125 * z2 * z2
        - blend.eval(level) * (2.0 * zeta * z1 + z2) * (z1 - y);
    inner.max(0.0)
}

/// Closed-form observer correction of the example.
pub fn planar_correction_closed_form(z: &Vector, y: f64, u: f64, zeta: f64, blend: &BlendingFn) -> Vector {
    let (z1, z2) = (z[0], z[1]);
    let sq = z1 * z1 + z2 * z2;
    let e = z1 - y;
    let base = Vector::from_vec(vec![-2.0 * zeta * e, -e]);
    if sq <= 2.0 {
        return base;
    }
    let scale = planar_phi_closed_form(z, y, u, zeta, blend) / sq;
    Vector::from_vec(vec![base[0] - scale * z1, base[1] - scale * z2])
}

/// One step of the example's explicit prediction recursion on
/// `[window_start + i h, window_start + (i + 1) h]`.
pub fn planar_predictor_step(
    q: &Vector,
    hist: &InputHistory,
    window_start: f64,
    i: usize,
    h: f64,
    zeta: f64,
) -> Result<Vector> {
    let t0 = window_start + i as f64 * h;
    let t1 = window_start + (i + 1) as f64 * h;
    let input = hist.integral(t0, t1)?[0];
    let (q1, q2) = (q[0], q[1]);
    Ok(Vector::from_vec(vec![
        (1.0 + zeta * h) * q1 - 10.0 * h * q1 * q1 * q1 + h * q2,
        (1.0 - 13.0 * h / 4.0) * q2 + input,
    ]))
}
