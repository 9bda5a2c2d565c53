//! Plant and assumption data.
//!
//! A plant is `x' = f(x, u(t - tau))` with sampled output `y(t_i) = h(x(t_i - r))`
//! and inputs restricted to an axis-aligned box `U` containing the origin.
//! The assumption data bundles the Lyapunov-type functions, the local
//! controller and observer gain, and the scalar constants the closed loop
//! is built from.

use std::fmt;
use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// Vector field and output map of a plant.
pub trait Dynamics: Send + Sync {
    fn state_dim(&self) -> usize;
    fn input_dim(&self) -> usize;
    fn output_dim(&self) -> usize;
    fn vector_field(&self, x: &Vector, u: &Vector) -> Vector;
    fn output(&self, x: &Vector) -> Vector;
    /// Jacobian of [`Dynamics::output`], `output_dim x state_dim`.
    fn output_jacobian(&self, x: &Vector) -> Matrix;
}

type FieldFn = dyn Fn(&Vector, &Vector) -> Vector + Send + Sync;
type OutputFn = dyn Fn(&Vector) -> Vector + Send + Sync;
type JacobianFn = dyn Fn(&Vector) -> Matrix + Send + Sync;

/// [`Dynamics`] assembled from closures. Handy for test doubles and
/// user-supplied models.
pub struct FnDynamics {
    dims: (usize, usize, usize),
    field: Box<FieldFn>,
    output: Box<OutputFn>,
    jacobian: Box<JacobianFn>,
}

impl FnDynamics {
    pub fn new(
        state_dim: usize,
        input_dim: usize,
        output_dim: usize,
        field: impl Fn(&Vector, &Vector) -> Vector + Send + Sync + 'static,
        output: impl Fn(&Vector) -> Vector + Send + Sync + 'static,
        jacobian: impl Fn(&Vector) -> Matrix + Send + Sync + 'static,
    ) -> Self {
        Self {
            dims: (state_dim, input_dim, output_dim),
            field: Box::new(field),
            output: Box::new(output),
            jacobian: Box::new(jacobian),
        }
    }
}

impl Dynamics for FnDynamics {
    fn state_dim(&self) -> usize {
        self.dims.0
    }
    fn input_dim(&self) -> usize {
        self.dims.1
    }
    fn output_dim(&self) -> usize {
        self.dims.2
    }
    fn vector_field(&self, x: &Vector, u: &Vector) -> Vector {
        (self.field)(x, u)
    }
    fn output(&self, x: &Vector) -> Vector {
        (self.output)(x)
    }
    fn output_jacobian(&self, x: &Vector) -> Matrix {
        (self.jacobian)(x)
    }
}

/// Axis-aligned compact input set `U = [lo_1, hi_1] x ... x [lo_m, hi_m]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl InputBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::config("input box bounds must be nonempty and of equal length"));
        }
        for (j, (l, h)) in lo.iter().zip(&hi).enumerate() {
            if !(l.is_finite() && h.is_finite() && l <= h) {
                return Err(Error::config(format!(
                    "input box component {j}: need finite lo <= hi, got [{l}, {h}]"
                )));
            }
        }
        Ok(Self { lo, hi })
    }

    /// `[-bound, bound]^m`.
    pub fn symmetric(dim: usize, bound: f64) -> Result<Self> {
        Self::new(vec![-bound; dim], vec![bound; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lo
    }

    pub fn upper(&self) -> &[f64] {
        &self.hi
    }

    pub fn contains(&self, u: &Vector) -> bool {
        u.len() == self.dim()
            && u.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(v, (l, h))| *l <= *v && *v <= *h)
    }

    pub fn contains_origin(&self) -> bool {
        self.lo.iter().zip(&self.hi).all(|(l, h)| *l <= 0.0 && 0.0 <= *h)
    }

    /// Componentwise projection onto the box.
    pub fn clamp(&self, u: &Vector) -> Vector {
        Vector::from_iterator(
            u.len(),
            u.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .map(|(v, (l, h))| v.max(*l).min(*h)),
        )
    }
}

/// `min(hi, max(lo, u_raw))` componentwise.
pub fn clamp_input(u_raw: &Vector, input_box: &InputBox) -> Vector {
    input_box.clamp(u_raw)
}

/// Plant together with its input set and delays.
#[derive(Clone)]
pub struct PlantModel {
    dynamics: Arc<dyn Dynamics>,
    input_box: InputBox,
    measurement_delay: f64,
    input_delay: f64,
}

impl fmt::Debug for PlantModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PlantModel")
            .field("n", &self.n())
            .field("m", &self.m())
            .field("k", &self.k())
            .field("input_box", &self.input_box)
            .field("r", &self.measurement_delay)
            .field("tau", &self.input_delay)
            .finish()
    }
}

impl PlantModel {
    pub fn new(
        dynamics: Arc<dyn Dynamics>,
        input_box: InputBox,
        measurement_delay: f64,
        input_delay: f64,
    ) -> Result<Self> {
        if input_box.dim() != dynamics.input_dim() {
            return Err(Error::config(format!(
                "input box has dimension {} but the plant takes {} inputs",
                input_box.dim(),
                dynamics.input_dim()
            )));
        }
        if !input_box.contains_origin() {
            return Err(Error::config("the input box must contain the origin"));
        }
        let n = dynamics.state_dim();
        let zero_x = Vector::zeros(n);
        let zero_u = Vector::zeros(dynamics.input_dim());
        let f0 = dynamics.vector_field(&zero_x, &zero_u);
        let h0 = dynamics.output(&zero_x);
        if f0.len() != n || h0.len() != dynamics.output_dim() {
            return Err(Error::config("vector field or output has the wrong dimension"));
        }
        if f0.amax() > 1e-12 || h0.amax() > 1e-12 {
            return Err(Error::config(
                "the origin must be an equilibrium: f(0,0) = 0 and h(0) = 0",
            ));
        }
        let plant = Self {
            dynamics,
            input_box,
            measurement_delay: 0.0,
            input_delay: 0.0,
        };
        plant.with_delays(measurement_delay, input_delay)
    }

    /// Same plant with measurement delay `r` and input delay `tau`.
    pub fn with_delays(mut self, r: f64, tau: f64) -> Result<Self> {
        if !(r.is_finite() && tau.is_finite() && r >= 0.0 && tau >= 0.0) {
            return Err(Error::config(format!(
                "delays must be finite and >= 0, got r = {r}, tau = {tau}"
            )));
        }
        self.measurement_delay = r;
        self.input_delay = tau;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.dynamics.state_dim()
    }
    pub fn m(&self) -> usize {
        self.dynamics.input_dim()
    }
    pub fn k(&self) -> usize {
        self.dynamics.output_dim()
    }

    pub fn f(&self, x: &Vector, u: &Vector) -> Vector {
        self.dynamics.vector_field(x, u)
    }
    pub fn h(&self, x: &Vector) -> Vector {
        self.dynamics.output(x)
    }
    pub fn jac_h(&self, x: &Vector) -> Matrix {
        self.dynamics.output_jacobian(x)
    }

    pub fn input_box(&self) -> &InputBox {
        &self.input_box
    }

    /// Measurement delay `r`.
    pub fn measurement_delay(&self) -> f64 {
        self.measurement_delay
    }
    /// Input delay `tau`.
    pub fn input_delay(&self) -> f64 {
        self.input_delay
    }
    /// Prediction horizon `r + tau`.
    pub fn total_delay(&self) -> f64 {
        self.measurement_delay + self.input_delay
    }
    pub fn is_delay_free(&self) -> bool {
        self.measurement_delay == 0.0 && self.input_delay == 0.0
    }

    pub fn dynamics(&self) -> &Arc<dyn Dynamics> {
        &self.dynamics
    }
}

/// Lyapunov-type functions and local feedback used by the closed loop.
pub trait AssumptionFns: Send + Sync {
    /// `V`: radially unbounded, not necessarily positive definite.
    fn lyapunov(&self, x: &Vector) -> f64;
    fn lyapunov_gradient(&self, x: &Vector) -> Vector;
    /// `W`: positive definite dissipation rate outside the absorbing set.
    fn dissipation(&self, x: &Vector) -> f64;
    /// `P`: local quadratic-type Lyapunov function for the local controller.
    fn local_lyapunov(&self, x: &Vector) -> f64;
    fn local_lyapunov_gradient(&self, x: &Vector) -> Vector;
    /// Local stabilizer `k` before projection onto `U`.
    fn local_control(&self, x: &Vector) -> Vector;
}

/// Scalar constants of the standing assumptions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssumptionConstants {
    /// Absorbing level `R`; `S1 = {V <= R}`.
    pub absorbing_level: f64,
    /// Blending levels `a < b`; `S2 = {V <= b}`.
    pub blend_lower: f64,
    pub blend_upper: f64,
    /// `c` in (0, 1).
    pub rate_fraction: f64,
    /// Observer contraction rate `omega`.
    pub observer_rate: f64,
    /// Local controller decay constant `mu`.
    pub control_rate: f64,
    /// `K1` with `K1 |x|^2 <= P(x)` on `S1`.
    pub p_lower_bound: f64,
}

impl AssumptionConstants {
    pub fn validate(&self) -> Result<()> {
        let c = self;
        let all_finite = [
            c.absorbing_level,
            c.blend_lower,
            c.blend_upper,
            c.rate_fraction,
            c.observer_rate,
            c.control_rate,
            c.p_lower_bound,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::config("assumption constants must be finite"));
        }
        if !(c.absorbing_level > 0.0 && c.absorbing_level <= c.blend_lower && c.blend_lower < c.blend_upper) {
            return Err(Error::config(format!(
                "need 0 < R <= a < b, got R = {}, a = {}, b = {}",
                c.absorbing_level, c.blend_lower, c.blend_upper
            )));
        }
        if !(c.rate_fraction > 0.0 && c.rate_fraction < 1.0) {
            return Err(Error::config(format!("c must lie in (0, 1), got {}", c.rate_fraction)));
        }
        if !(c.observer_rate > 0.0 && c.control_rate > 0.0 && c.p_lower_bound > 0.0) {
            return Err(Error::config("omega, mu and K1 must be positive"));
        }
        Ok(())
    }
}

/// Assumption functions, observer gain `L`, metric `Q`, and constants.
#[derive(Clone)]
pub struct AssumptionData {
    fns: Arc<dyn AssumptionFns>,
    gain: Matrix,
    metric: Matrix,
    constants: AssumptionConstants,
}

impl fmt::Debug for AssumptionData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AssumptionData")
            .field("gain", &self.gain)
            .field("metric", &self.metric)
            .field("constants", &self.constants)
            .finish()
    }
}

impl AssumptionData {
    pub fn new(
        plant: &PlantModel,
        fns: Arc<dyn AssumptionFns>,
        gain: Matrix,
        metric: Matrix,
        constants: AssumptionConstants,
    ) -> Result<Self> {
        constants.validate()?;
        let (n, k) = (plant.n(), plant.k());
        if gain.shape() != (n, k) {
            return Err(Error::config(format!(
                "observer gain must be {n} x {k}, got {:?}",
                gain.shape()
            )));
        }
        if metric.shape() != (n, n) {
            return Err(Error::config(format!(
                "metric Q must be {n} x {n}, got {:?}",
                metric.shape()
            )));
        }
        let asym = (&metric - metric.transpose()).amax();
        if asym > 1e-12 * metric.amax().max(1.0) {
            return Err(Error::config("metric Q must be symmetric"));
        }
        if Cholesky::new(metric.clone()).is_none() {
            return Err(Error::config("metric Q must be positive definite"));
        }
        Ok(Self {
            fns,
            gain,
            metric,
            constants,
        })
    }

    pub fn constants(&self) -> &AssumptionConstants {
        &self.constants
    }

    /// Replaces the constants, revalidating them.
    pub fn with_constants(mut self, constants: AssumptionConstants) -> Result<Self> {
        constants.validate()?;
        self.constants = constants;
        Ok(self)
    }

    /// Replaces the assumption functions (used for ablations and test doubles).
    pub fn with_fns(mut self, fns: Arc<dyn AssumptionFns>) -> Self {
        self.fns = fns;
        self
    }

    pub fn fns(&self) -> &Arc<dyn AssumptionFns> {
        &self.fns
    }

    /// Observer gain `L`.
    pub fn gain(&self) -> &Matrix {
        &self.gain
    }
    /// Metric `Q`.
    pub fn metric(&self) -> &Matrix {
        &self.metric
    }

    pub fn v(&self, x: &Vector) -> f64 {
        self.fns.lyapunov(x)
    }
    pub fn grad_v(&self, x: &Vector) -> Vector {
        self.fns.lyapunov_gradient(x)
    }
    pub fn w(&self, x: &Vector) -> f64 {
        self.fns.dissipation(x)
    }
    pub fn p(&self, x: &Vector) -> f64 {
        self.fns.local_lyapunov(x)
    }
    pub fn grad_p(&self, x: &Vector) -> Vector {
        self.fns.local_lyapunov_gradient(x)
    }
    pub fn k_local(&self, x: &Vector) -> Vector {
        self.fns.local_control(x)
    }
}

/// Largest discrepancy between the supplied derivatives (`grad V`, `grad P`,
/// `jac h`) and central finite differences over `points`.
pub fn derivative_mismatch(plant: &PlantModel, assm: &AssumptionData, points: &[Vector]) -> f64 {
    let mut worst: f64 = 0.0;
    for x in points {
        let step = 1e-6 * x.amax().max(1.0);
        let gv = assm.grad_v(x);
        let gp = assm.grad_p(x);
        let jh = plant.jac_h(x);
        for i in 0..x.len() {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += step;
            xm[i] -= step;
            let dv = (assm.v(&xp) - assm.v(&xm)) / (2.0 * step);
            let dp = (assm.p(&xp) - assm.p(&xm)) / (2.0 * step);
            let dh = (plant.h(&xp) - plant.h(&xm)) / (2.0 * step);
            worst = worst.max((dv - gv[i]).abs()).max((dp - gp[i]).abs());
            for row in 0..dh.len() {
                worst = worst.max((dh[row] - jh[(row, i)]).abs());
            }
        }
    }
    worst
}
