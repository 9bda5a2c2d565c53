//! Convergence of the Euler predictor against a fine RK4 reference.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::history::InputHistory;
use crate::model::{PlantModel, Vector};
use crate::predictor::euler_predict;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudyPoint {
    #[serde(rename = "N")]
    pub steps: usize,
    pub error: f64,
}

/// RK4 over `[t_now - r - tau, t_now)` from `x0`, restarting at every input
/// jump so that each substep sees a constant input.
pub fn rk4_reference(plant: &PlantModel, x0: &Vector, hist: &InputHistory, t_now: f64, substep: f64) -> Result<Vector> {
    let mut x = x0.clone();
    for (span, u) in hist.pieces(t_now - plant.total_delay(), t_now)? {
        let steps = (span / substep).ceil().max(1.0) as usize;
        let h = span / steps as f64;
        for _ in 0..steps {
            let k1 = plant.f(&x, u);
            let k2 = plant.f(&(&x + &k1 * (0.5 * h)), u);
            let k3 = plant.f(&(&x + &k2 * (0.5 * h)), u);
            let k4 = plant.f(&(&x + &k3 * h), u);
            x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        }
    }
    Ok(x)
}

/// Prediction error `|x_ref - Phi_N(x0, u)|` for each `N` in `steps`.
pub fn predictor_convergence_study(
    plant: &PlantModel,
    x0: &Vector,
    hist: &InputHistory,
    t_now: f64,
    steps: &[usize],
    ref_substep: f64,
) -> Result<Vec<StudyPoint>> {
    if !(ref_substep > 0.0 && ref_substep <= 1e-4) {
        return Err(Error::config(format!(
            "reference substep must lie in (0, 1e-4], got {ref_substep}"
        )));
    }
    if steps.is_empty() || steps.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::config("N list must be nonempty and strictly increasing"));
    }
    let reference = rk4_reference(plant, x0, hist, t_now, ref_substep)?;
    steps
        .iter()
        .map(|&n| {
            let predicted = euler_predict(plant, x0, hist, t_now, n)?;
            Ok(StudyPoint {
                steps: n,
                error: (&reference - predicted).norm(),
            })
        })
        .collect()
}
