//! Zero-order-hold control law: predict, apply the local controller, project onto `U`.

use crate::error::Result;
use crate::history::InputHistory;
use crate::model::{AssumptionData, PlantModel, Vector};
use crate::predictor::euler_predict;

/// Control value held on `[t_hold, t_hold + T_H)`.
///
/// `hist` must cover the open window `[t_hold - r - tau, t_hold)`; the value
/// being computed is not part of it.
pub fn hold_control(
    plant: &PlantModel,
    assm: &AssumptionData,
    z_at_hold: &Vector,
    hist: &InputHistory,
    t_hold: f64,
    steps: usize,
) -> Result<Vector> {
    let predicted = euler_predict(plant, z_at_hold, hist, t_hold, steps)?;
    Ok(plant.input_box().clamp(&assm.k_local(&predicted)))
}

/// Delay-free law `k(z(j T_H))`.
pub fn hold_control_delay_free(plant: &PlantModel, assm: &AssumptionData, z_at_hold: &Vector) -> Vector {
    plant.input_box().clamp(&assm.k_local(z_at_hold))
}
