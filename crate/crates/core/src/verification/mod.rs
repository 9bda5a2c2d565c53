//! Numerical certification of the standing assumptions, the observer
//! inequalities and the predictor's convergence order.

pub mod checks;
pub mod sampling;
pub mod study;

use serde::{Deserialize, Serialize};

pub use checks::{
    check_contraction_a1, check_dissipation_37, check_h1, check_h2, check_h3, check_h4, check_h4_strong,
    check_zeta_bound, run_check, CheckReport, CheckSettings,
};
pub use study::{predictor_convergence_study, StudyPoint};

use crate::error::{Error, Result};
use crate::model::{AssumptionData, PlantModel};
use crate::observer::{BlendingFn, Damping};

/// Combined result of [`run_standard_suite`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub zeta: Option<f64>,
    pub zeta_bound: Option<bool>,
    pub checks: Vec<CheckReport>,
    pub all_pass: bool,
}

/// H4 with every sample failing the side conditions, reported as vacuous.
fn vacuous_h4(settings: &CheckSettings, skipped: usize) -> CheckReport {
    CheckReport {
        name: "H4".into(),
        points_tested: 0,
        skipped,
        worst_margin: None,
        worst_point: Vec::new(),
        pass: true,
        tolerance: settings.tolerance,
        seed: settings.seed,
        note: Some(
            "no sample satisfied grad V(z) Q (z - x) < 0; the inequality is vacuous on the sampled region, \
             see H4-strong for the sufficient condition"
                .into(),
        ),
    }
}

/// H1 to H4, the strong H4 form, the contraction inequality and the
/// dissipation inequality, plus the `zeta` gate when `zeta` is given.
pub fn run_standard_suite(
    plant: &PlantModel,
    assm: &AssumptionData,
    blend: &BlendingFn,
    settings: &CheckSettings,
    zeta: Option<f64>,
) -> Result<SuiteReport> {
    let zeta_bound = zeta.map(check_zeta_bound).transpose()?;
    let h4 = match check_h4(plant, assm, settings) {
        Ok(report) => report,
        Err(Error::InsufficientSamples { skipped, .. }) => vacuous_h4(settings, skipped),
        Err(e) => return Err(e),
    };
    let checks = vec![
        check_h1(plant, assm, settings)?,
        check_h2(plant, assm, settings)?,
        check_h3(plant, assm, settings)?,
        h4,
        check_h4_strong(plant, assm, settings)?,
        check_contraction_a1(plant, assm, blend, settings, None, Damping::Full)?,
        check_dissipation_37(plant, assm, blend, settings, Damping::Full)?,
    ];
    let all_pass = checks.iter().all(|c| c.pass) && zeta_bound.unwrap_or(true);
    Ok(SuiteReport {
        zeta,
        zeta_bound,
        checks,
        all_pass,
    })
}
