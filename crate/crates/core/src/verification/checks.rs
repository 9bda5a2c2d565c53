//! Sampled margins of the standing assumptions and of the two inequalities
//! the damped observer is built to satisfy.
//!
//! Every margin is arranged so that a non-positive value means the
//! inequality holds at that point.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::sampling::{draw_box, draw_input, LevelBand, StateSampler};
use crate::error::{Error, Result};
use crate::model::{AssumptionData, PlantModel, Vector};
use crate::observer::{observer_correction_with, BlendingFn, Damping};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub points_tested: usize,
    pub skipped: usize,
    /// Largest margin seen; empty when no sample was admissible.
    pub worst_margin: Option<f64>,
    pub worst_point: Vec<f64>,
    pub pass: bool,
    pub tolerance: f64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Sample count, seed and tolerance shared by the grid checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckSettings {
    pub points: usize,
    pub seed: u64,
    pub tolerance: f64,
    /// Upper level of `V` for the unbounded regions of H1 and the dissipation check.
    pub v_max: f64,
    /// Half-width of the box from which free outputs `w` are drawn.
    pub output_bound: f64,
}

impl Default for CheckSettings {
    fn default() -> Self {
        Self {
            points: 10_000,
            seed: 0,
            tolerance: 1e-9,
            v_max: 100.0,
            output_bound: 10.0,
        }
    }
}

/// Draws `settings.points` samples and keeps the worst margin. A margin of
/// `None` marks a sample that fails the side conditions; it is counted as
/// skipped.
pub fn run_check(
    name: &str,
    settings: &CheckSettings,
    mut draw: impl FnMut(&mut ChaCha8Rng) -> Result<Vec<f64>>,
    margin: impl Fn(&[f64]) -> Result<Option<f64>>,
) -> Result<CheckReport> {
    if settings.points == 0 {
        return Err(Error::config(format!("{name}: the sampler yields no points")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut tested = 0;
    let mut skipped = 0;
    let mut worst: Option<(f64, Vec<f64>)> = None;
    for _ in 0..settings.points {
        let point = draw(&mut rng)?;
        match margin(&point)? {
            None => skipped += 1,
            Some(m) => {
                tested += 1;
                if worst.as_ref().is_none_or(|(w, _)| m > *w || w.is_nan()) {
                    worst = Some((m, point));
                }
            }
        }
    }
    let Some((worst_margin, worst_point)) = worst else {
        return Err(Error::InsufficientSamples {
            check: name.to_string(),
            skipped,
        });
    };
    Ok(CheckReport {
        name: name.to_string(),
        points_tested: tested,
        skipped,
        worst_margin: Some(worst_margin),
        worst_point,
        pass: worst_margin <= settings.tolerance,
        tolerance: settings.tolerance,
        seed: settings.seed,
        note: None,
    })
}

fn split(point: &[f64], sizes: &[usize]) -> Vec<Vector> {
    let mut out = Vec::with_capacity(sizes.len());
    let mut at = 0;
    for &len in sizes {
        out.push(Vector::from_column_slice(&point[at..at + len]));
        at += len;
    }
    out
}

fn join(parts: &[&Vector]) -> Vec<f64> {
    parts.iter().flat_map(|v| v.iter().copied()).collect()
}

/// `grad V(x) f(x, u) + W(x)`.
pub fn h1_margin(plant: &PlantModel, assm: &AssumptionData, x: &Vector, u: &Vector) -> f64 {
    assm.grad_v(x).dot(&plant.f(x, u)) + assm.w(x)
}

/// `(grad P(x) f(x, k(x)) + 2 mu |x|^2, K1 |x|^2 - P(x))` with `k` the
/// local controller projected onto `U`.
pub fn h2_margins(plant: &PlantModel, assm: &AssumptionData, x: &Vector) -> (f64, f64) {
    let k = plant.input_box().clamp(&assm.k_local(x));
    let c = assm.constants();
    let sq = x.norm_squared();
    (
        assm.grad_p(x).dot(&plant.f(x, &k)) + 2.0 * c.control_rate * sq,
        c.p_lower_bound * sq - assm.p(x),
    )
}

/// `(z - x)' Q (f(z,u) + L(h(z) - h(x)) - f(x,u))`.
fn local_observer_rate(plant: &PlantModel, assm: &AssumptionData, z: &Vector, x: &Vector, u: &Vector) -> f64 {
    let e = z - x;
    let drift = plant.f(z, u) + assm.gain() * (plant.h(z) - plant.h(x)) - plant.f(x, u);
    e.dot(&(assm.metric() * drift))
}

/// Left side of H3 plus `omega |z - x|^2`.
pub fn h3_margin(plant: &PlantModel, assm: &AssumptionData, z: &Vector, x: &Vector, u: &Vector) -> f64 {
    local_observer_rate(plant, assm, z, x, u) + assm.constants().observer_rate * (z - x).norm_squared()
}

/// `grad V(z) Q (z - x)`, the denominator of the H4 ratio.
pub fn h4_denominator(assm: &AssumptionData, z: &Vector, x: &Vector) -> f64 {
    assm.grad_v(z).dot(&(assm.metric() * (z - x)))
}

/// Whether `(z, x)` meets the side conditions of H4.
pub fn h4_admissible(assm: &AssumptionData, z: &Vector, x: &Vector) -> bool {
    let c = assm.constants();
    let vz = assm.v(z);
    vz > c.blend_lower && vz <= c.blend_upper && assm.v(x) <= c.absorbing_level && h4_denominator(assm, z, x) < 0.0
}

/// H4 margin; meaningful where the denominator is nonzero.
pub fn h4_margin(plant: &PlantModel, assm: &AssumptionData, z: &Vector, x: &Vector, u: &Vector) -> f64 {
    let grad = assm.grad_v(z);
    let local = plant.f(z, u) + assm.gain() * (plant.h(z) - plant.h(x));
    let c = assm.constants().rate_fraction;
    grad.dot(&local) + assm.w(z)
        - (1.0 - c) * grad.norm_squared() * local_observer_rate(plant, assm, z, x, u) / h4_denominator(assm, z, x)
}

/// `grad V(z) (f(z,u) + L(h(z) - h(x))) + W(z)`. Its non-positivity on the
/// H4 region, without the sign condition on the denominator, implies H4 for
/// every `c` in `(0, 1)`.
pub fn h4_strong_margin(plant: &PlantModel, assm: &AssumptionData, z: &Vector, x: &Vector, u: &Vector) -> f64 {
    let local = plant.f(z, u) + assm.gain() * (plant.h(z) - plant.h(x));
    assm.grad_v(z).dot(&local) + assm.w(z)
}

/// `(z - x)' Q (f(z,u) + k^(z, h(x), u) - f(x,u)) + c omega |z - x|^2`.
#[allow(clippy::too_many_arguments)]
pub fn a1_margin(
    plant: &PlantModel,
    assm: &AssumptionData,
    blend: &BlendingFn,
    x: &Vector,
    z: &Vector,
    u: &Vector,
    c: f64,
    damping: Damping,
) -> Result<f64> {
    let correction = observer_correction_with(plant, assm, blend, z, &plant.h(x), u, damping)?;
    let e = z - x;
    let drift = plant.f(z, u) + correction - plant.f(x, u);
    Ok(e.dot(&(assm.metric() * drift)) + c * assm.constants().observer_rate * e.norm_squared())
}

/// `grad V(z) (f(z,u) + k^(z, w, u)) + W(z)`.
pub fn d37_margin(
    plant: &PlantModel,
    assm: &AssumptionData,
    blend: &BlendingFn,
    z: &Vector,
    w: &Vector,
    u: &Vector,
    damping: Damping,
) -> Result<f64> {
    let correction = observer_correction_with(plant, assm, blend, z, w, u, damping)?;
    Ok(assm.grad_v(z).dot(&(plant.f(z, u) + correction)) + assm.w(z))
}

pub fn check_h1(plant: &PlantModel, assm: &AssumptionData, settings: &CheckSettings) -> Result<CheckReport> {
    let (n, m) = (plant.n(), plant.m());
    let band = LevelBand::closed(assm.constants().absorbing_level, settings.v_max);
    let xs = StateSampler::new(assm, n, band)?;
    run_check(
        "H1",
        settings,
        |rng| Ok(join(&[&xs.draw(assm, rng)?, &draw_input(plant.input_box(), rng)])),
        |p| {
            let v = split(p, &[n, m]);
            Ok(Some(h1_margin(plant, assm, &v[0], &v[1])))
        },
    )
}

pub fn check_h2(plant: &PlantModel, assm: &AssumptionData, settings: &CheckSettings) -> Result<CheckReport> {
    let xs = StateSampler::new(assm, plant.n(), LevelBand::below(assm.constants().absorbing_level))?;
    run_check(
        "H2",
        settings,
        |rng| Ok(join(&[&xs.draw(assm, rng)?])),
        |p| {
            let (decay, lower) = h2_margins(plant, assm, &Vector::from_column_slice(p));
            Ok(Some(decay.max(lower)))
        },
    )
}

/// Draws `(z, x, u)` with `V(z)` in `z_band` and `V(x) <= R`.
fn observer_triples<'a>(
    plant: &'a PlantModel,
    assm: &'a AssumptionData,
    z_band: LevelBand,
) -> Result<impl FnMut(&mut ChaCha8Rng) -> Result<Vec<f64>> + 'a> {
    let zs = StateSampler::new(assm, plant.n(), z_band)?;
    let xs = StateSampler::new(assm, plant.n(), LevelBand::below(assm.constants().absorbing_level))?;
    Ok(move |rng: &mut ChaCha8Rng| {
        let z = zs.draw(assm, rng)?;
        let x = xs.draw(assm, rng)?;
        Ok(join(&[&z, &x, &draw_input(plant.input_box(), rng)]))
    })
}

pub fn check_h3(plant: &PlantModel, assm: &AssumptionData, settings: &CheckSettings) -> Result<CheckReport> {
    let (n, m) = (plant.n(), plant.m());
    let draw = observer_triples(plant, assm, LevelBand::below(assm.constants().blend_upper))?;
    run_check("H3", settings, draw, |p| {
        let v = split(p, &[n, n, m]);
        Ok(Some(h3_margin(plant, assm, &v[0], &v[1], &v[2])))
    })
}

/// H4 over `a < V(z) <= b`, `V(x) <= R`; samples with
/// `grad V(z) Q (z - x) >= 0` are skipped. Fails with
/// [`Error::InsufficientSamples`] when every sample is skipped.
pub fn check_h4(plant: &PlantModel, assm: &AssumptionData, settings: &CheckSettings) -> Result<CheckReport> {
    let (n, m) = (plant.n(), plant.m());
    let c = assm.constants();
    let draw = observer_triples(plant, assm, LevelBand::open_below(c.blend_lower, c.blend_upper))?;
    run_check("H4", settings, draw, |p| {
        let v = split(p, &[n, n, m]);
        Ok(h4_admissible(assm, &v[0], &v[1]).then(|| h4_margin(plant, assm, &v[0], &v[1], &v[2])))
    })
}

pub fn check_h4_strong(plant: &PlantModel, assm: &AssumptionData, settings: &CheckSettings) -> Result<CheckReport> {
    let (n, m) = (plant.n(), plant.m());
    let c = assm.constants();
    let draw = observer_triples(plant, assm, LevelBand::open_below(c.blend_lower, c.blend_upper))?;
    run_check("H4-strong", settings, draw, |p| {
        let v = split(p, &[n, n, m]);
        Ok(Some(h4_strong_margin(plant, assm, &v[0], &v[1], &v[2])))
    })
}

/// Contraction of the damped observer on `S1 x S2 x U`. `rate_fraction`
/// overrides `c` when given.
pub fn check_contraction_a1(
    plant: &PlantModel,
    assm: &AssumptionData,
    blend: &BlendingFn,
    settings: &CheckSettings,
    rate_fraction: Option<f64>,
    damping: Damping,
) -> Result<CheckReport> {
    let (n, m) = (plant.n(), plant.m());
    let c = rate_fraction.unwrap_or(assm.constants().rate_fraction);
    let draw = observer_triples(plant, assm, LevelBand::below(assm.constants().blend_upper))?;
    let name = match damping {
        Damping::Full => "A1",
        Damping::Off => "A1-undamped",
    };
    run_check(name, settings, draw, |p| {
        let v = split(p, &[n, n, m]);
        a1_margin(plant, assm, blend, &v[1], &v[0], &v[2], c, damping).map(Some)
    })
}

/// Dissipation of the damped observer for `b <= V(z) <= v_max` and free outputs `w`.
pub fn check_dissipation_37(
    plant: &PlantModel,
    assm: &AssumptionData,
    blend: &BlendingFn,
    settings: &CheckSettings,
    damping: Damping,
) -> Result<CheckReport> {
    let (n, k, m) = (plant.n(), plant.k(), plant.m());
    let zs = StateSampler::new(assm, n, LevelBand::closed(assm.constants().blend_upper, settings.v_max))?;
    let name = match damping {
        Damping::Full => "D37",
        Damping::Off => "D37-undamped",
    };
    run_check(
        name,
        settings,
        |rng| {
            let z = zs.draw(assm, rng)?;
            let w = draw_box(settings.output_bound, k, rng);
            Ok(join(&[&z, &w, &draw_input(plant.input_box(), rng)]))
        },
        |p| {
            let v = split(p, &[n, k, m]);
            d37_margin(plant, assm, blend, &v[0], &v[1], &v[2], damping).map(Some)
        },
    )
}

/// `25001 zeta^2 + 2 zeta <= 4`.
pub fn check_zeta_bound(zeta: f64) -> Result<bool> {
    if !(zeta > 0.0) {
        return Err(Error::config(format!("zeta must be positive, got {zeta}")));
    }
    Ok(crate::planar::zeta_bound_holds(zeta))
}

/// Re-evaluates the margin of a named check at a stored point.
pub fn reevaluate(
    report: &CheckReport,
    plant: &PlantModel,
    assm: &AssumptionData,
    blend: &BlendingFn,
    rate_fraction: Option<f64>,
) -> Result<f64> {
    let (n, k, m) = (plant.n(), plant.k(), plant.m());
    let p = &report.worst_point;
    let c = rate_fraction.unwrap_or(assm.constants().rate_fraction);
    Ok(match report.name.as_str() {
        "H1" => {
            let v = split(p, &[n, m]);
            h1_margin(plant, assm, &v[0], &v[1])
        }
        "H2" => {
            let (a, b) = h2_margins(plant, assm, &Vector::from_column_slice(p));
            a.max(b)
        }
        "H3" | "H4" | "H4-strong" => {
            let v = split(p, &[n, n, m]);
            match report.name.as_str() {
                "H3" => h3_margin(plant, assm, &v[0], &v[1], &v[2]),
                "H4" => h4_margin(plant, assm, &v[0], &v[1], &v[2]),
                _ => h4_strong_margin(plant, assm, &v[0], &v[1], &v[2]),
            }
        }
        "A1" | "A1-undamped" => {
            let v = split(p, &[n, n, m]);
            let damping = if report.name == "A1" {
                Damping::Full
            } else {
                Damping::Off
            };
            a1_margin(plant, assm, blend, &v[1], &v[0], &v[2], c, damping)?
        }
        "D37" | "D37-undamped" => {
            let v = split(p, &[n, k, m]);
            let damping = if report.name == "D37" {
                Damping::Full
            } else {
                Damping::Off
            };
            d37_margin(plant, assm, blend, &v[0], &v[1], &v[2], damping)?
        }
        other => return Err(Error::config(format!("unknown check {other}"))),
    })
}
