//! Hybrid closed-loop integration.
//!
//! The plant state `x(t)`, the observer state `z(t)` (an estimate of
//! `x(t - r)`) and the inter-sample output predictor `w(t)` are integrated
//! together with classical RK4. Integration stops at every sampling instant,
//! every hold instant, every recording instant and at each time where one of
//! the delayed inputs `u(t - tau)`, `u(t - r - tau)` jumps or where a later
//! reset will need the plant state. Between two stops all inputs are
//! constant, so each span uses a single input value.

use std::thread;

use serde::{Deserialize, Serialize};

use crate::controller::{hold_control, hold_control_delay_free};
use crate::error::{Error, Result};
use crate::history::{InputHistory, StateHistory};
use crate::model::{AssumptionData, PlantModel, Vector};
use crate::observer::{isp_reset, observer_correction, BlendingFn};
use crate::schedule::{generate_partition, SamplingPartition, SimConfig};
use crate::trajectory::{DecayCriterion, ResetRecord, RunSummary, Trajectory, TrajectoryRow};

/// Plant state on `[-r, 0]`.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Constant(Vector),
    /// Samples `(theta, x0(theta))`, increasing, from `-r` to `0`; linear in between.
    Table(Vec<(f64, Vector)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    x0: StateHistory,
    z0: Vector,
    u0: InputHistory,
    w0: Vector,
}

impl InitialData {
    pub fn new(plant: &PlantModel, x0: InitialState, z0: Vector, u0: InputHistory, w0: Vector) -> Result<Self> {
        let r = plant.measurement_delay();
        let x0 = match x0 {
            InitialState::Constant(x) => {
                check_dim("x0", &x, plant.n())?;
                StateHistory::constant(-r, 0.0, x)?
            }
            InitialState::Table(samples) => {
                for (_, x) in &samples {
                    check_dim("x0", x, plant.n())?;
                }
                StateHistory::from_samples(samples)?
            }
        };
        if x0.coverage() != (-r, 0.0) {
            let (a, b) = x0.coverage();
            return Err(Error::config(format!(
                "x0 must cover exactly [{}, 0], got [{a}, {b}]",
                -r
            )));
        }
        check_dim("z0", &z0, plant.n())?;
        check_dim("w0", &w0, plant.k())?;
        let window = -plant.total_delay();
        if u0.coverage() != (window, 0.0) {
            let (a, b) = u0.coverage();
            return Err(Error::config(format!(
                "u0 must cover exactly [{window}, 0), got [{a}, {b})"
            )));
        }
        for (_, _, u) in u0.segments() {
            check_dim("u0", u, plant.m())?;
            if !plant.input_box().contains(u) {
                return Err(Error::config(format!("u0 value {} lies outside U", u.transpose())));
            }
        }
        Ok(Self { x0, z0, u0, w0 })
    }

    /// Constant `x0`, constant `u0`, and `w0 = 0`.
    pub fn constant(plant: &PlantModel, x0: Vector, z0: Vector, u0: Vector) -> Result<Self> {
        let window = plant.total_delay();
        let hist = if window > 0.0 {
            InputHistory::constant(-window, 0.0, u0)?
        } else {
            check_dim("u0", &u0, plant.m())?;
            InputHistory::new(0.0)
        };
        Self::new(plant, InitialState::Constant(x0), z0, hist, Vector::zeros(plant.k()))
    }

    pub fn x0(&self) -> &StateHistory {
        &self.x0
    }

    pub fn z0(&self) -> &Vector {
        &self.z0
    }

    pub fn u0(&self) -> &InputHistory {
        &self.u0
    }

    pub fn w0(&self) -> &Vector {
        &self.w0
    }
}

fn check_dim(name: &str, v: &Vector, dim: usize) -> Result<()> {
    if v.len() != dim {
        return Err(Error::config(format!(
            "{name} has dimension {}, expected {dim}",
            v.len()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Default)]
struct Event {
    t: f64,
    sample: bool,
    hold: bool,
    record: bool,
}

fn merge_tolerance(t: f64) -> f64 {
    1e-12 * t.abs().max(1.0)
}

/// Sorted event list; instants closer than the merge tolerance collapse onto
/// the earliest one.
fn build_events(
    plant: &PlantModel,
    partition: &SamplingPartition,
    config: &SimConfig,
    u0: &InputHistory,
) -> Vec<Event> {
    let (r, tau) = (plant.measurement_delay(), plant.input_delay());
    let horizon = config.horizon;
    let mut raw: Vec<Event> = Vec::new();
    let mut add = |t: f64, sample, hold, record| {
        if (0.0..=horizon).contains(&t) {
            raw.push(Event {
                t,
                sample,
                hold,
                record,
            });
        }
    };
    for &ti in partition.times() {
        add(ti, true, false, false);
        if r > 0.0 {
            add(ti - r, false, false, false);
        }
    }
    let mut jumps: Vec<f64> = u0.segments().map(|(s, _, _)| s).collect();
    let holds = (horizon / config.hold_period).floor() as u64;
    for j in 0..=holds {
        let t = j as f64 * config.hold_period;
        add(t, false, true, false);
        jumps.push(t);
    }
    if tau > 0.0 || r > 0.0 {
        for s in jumps {
            add(s + tau, false, false, false);
            add(s + r + tau, false, false, false);
        }
    }
    let records = (horizon / config.record_dt).floor() as u64;
    for k in 0..=records {
        add(k as f64 * config.record_dt, false, false, true);
    }
    add(horizon, false, false, true);

    raw.sort_by(|a, b| a.t.total_cmp(&b.t));
    let mut events: Vec<Event> = Vec::new();
    for e in raw {
        match events.last_mut() {
            Some(last) if e.t - last.t <= merge_tolerance(last.t) => {
                last.sample |= e.sample;
                last.hold |= e.hold;
                last.record |= e.record;
            }
            _ => events.push(e),
        }
    }
    events
}

/// Integrates the closed loop over `[0, config.horizon]`.
pub fn simulate_closed_loop(
    plant: &PlantModel,
    assm: &AssumptionData,
    blend: &BlendingFn,
    partition: &SamplingPartition,
    config: &SimConfig,
    init: &InitialData,
) -> Result<Trajectory> {
    config.validate()?;
    if partition.last() < config.horizon {
        return Err(Error::config(format!(
            "sampling partition ends at {} before the horizon {}",
            partition.last(),
            config.horizon
        )));
    }
    let (r, tau) = (plant.measurement_delay(), plant.input_delay());
    let delay = r + tau;
    let events = build_events(plant, partition, config, init.u0());
    let hold_times: Vec<f64> = events.iter().filter(|e| e.hold).map(|e| e.t).collect();
    let keep = r + config.hold_period + config.record_dt;

    let mut x_hist = init.x0().clone();
    let mut u_hist = init.u0().clone();
    let mut inputs = init.u0().clone();
    let x_prehistory: Vec<(f64, Vector)> = x_hist.samples().map(|(t, x)| (t, x.clone())).collect();

    let mut x = x_hist.last().1.clone();
    let mut z = init.z0().clone();
    let mut w = init.w0().clone();
    let mut node_max_vx = assm.v(&x);
    let mut node_max_vz = assm.v(&z);
    let mut rows = Vec::new();
    let mut resets = Vec::new();
    let mut next_hold = 0usize;
    let mut t = 0.0;

    for event in &events {
        if event.t > t {
            let span = event.t - t;
            let mid = t + 0.5 * span;
            let u_plant = u_hist.value_at(mid - tau)?.clone();
            let u_obs = u_hist.value_at(mid - delay)?.clone();
            let steps = (span / config.dt_max).ceil().max(1.0) as usize;
            let dt = span / steps as f64;
            let t0 = t;
            for s in 0..steps {
                rk4_step(plant, assm, blend, &mut x, &mut z, &mut w, &u_plant, &u_obs, dt)?;
                t = if s + 1 == steps {
                    event.t
                } else {
                    t0 + (s + 1) as f64 * dt
                };
                x_hist.push(t, x.clone())?;
                node_max_vx = node_max_vx.max(assm.v(&x));
                node_max_vz = node_max_vz.max(assm.v(&z));
            }
            x_hist.prune_before(t - keep);
        }

        if event.sample {
            let sample_time = t - r;
            let x_delayed = x_hist.value_at(sample_time)?;
            let y = plant.h(&x_delayed);
            w = isp_reset(&y);
            resets.push(ResetRecord {
                t,
                sample_time,
                x_delayed,
                y,
                w_after: w.clone(),
            });
        }
        if event.hold {
            let u = if plant.is_delay_free() {
                hold_control_delay_free(plant, assm, &z)
            } else {
                hold_control(plant, assm, &z, &u_hist, t, config.predictor_steps)?
            };
            next_hold += 1;
            let end = hold_times.get(next_hold).copied().unwrap_or(t + config.hold_period);
            u_hist.push(t, u.clone(), end)?;
            inputs.push(t, u, end)?;
            let cutoff = t - delay - config.hold_period;
            if u_hist.coverage().0 < cutoff && u_hist.len() > 1 {
                u_hist = trim_inputs(&u_hist, cutoff)?;
            }
        }
        if event.record || event.sample || event.hold {
            let norm = x_hist.sup_norm(t - r, t)? + z.norm() + u_hist.sup_norm(t - delay, t)?;
            rows.push(TrajectoryRow {
                t,
                x: x.clone(),
                z: z.clone(),
                w: w.clone(),
                u: u_hist.value_at(t)?.clone(),
                v_x: assm.v(&x),
                v_z: assm.v(&z),
                norm,
            });
        }
    }

    Ok(Trajectory {
        rows,
        resets,
        inputs,
        x_prehistory,
        node_max_vx,
        node_max_vz,
    })
}

/// Copy of `hist` restricted to segments that overlap `[cutoff, end)`.
fn trim_inputs(hist: &InputHistory, cutoff: f64) -> Result<InputHistory> {
    let kept: Vec<(f64, Vector)> = hist
        .segments()
        .filter(|(_, end, _)| *end > cutoff)
        .map(|(s, _, v)| (s, v.clone()))
        .collect();
    InputHistory::from_segments(kept, hist.coverage().1)
}

#[allow(clippy::too_many_arguments)]
fn rk4_step(
    plant: &PlantModel,
    assm: &AssumptionData,
    blend: &BlendingFn,
    x: &mut Vector,
    z: &mut Vector,
    w: &mut Vector,
    u_plant: &Vector,
    u_obs: &Vector,
    dt: f64,
) -> Result<()> {
    let field = |x: &Vector, z: &Vector, w: &Vector| -> Result<(Vector, Vector, Vector)> {
        let fz = plant.f(z, u_obs);
        let dw = plant.jac_h(z) * &fz;
        let dz = fz + observer_correction(plant, assm, blend, z, w, u_obs)?;
        Ok((plant.f(x, u_plant), dz, dw))
    };
    let half = 0.5 * dt;
    let (k1x, k1z, k1w) = field(x, z, w)?;
    let (k2x, k2z, k2w) = field(&(&*x + &k1x * half), &(&*z + &k1z * half), &(&*w + &k1w * half))?;
    let (k3x, k3z, k3w) = field(&(&*x + &k2x * half), &(&*z + &k2z * half), &(&*w + &k2w * half))?;
    let (k4x, k4z, k4w) = field(&(&*x + &k3x * dt), &(&*z + &k3z * dt), &(&*w + &k3w * dt))?;
    let sixth = dt / 6.0;
    *x += (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * sixth;
    *z += (k1z + k2z * 2.0 + k3z * 2.0 + k4z) * sixth;
    *w += (k1w + k2w * 2.0 + k3w * 2.0 + k4w) * sixth;
    Ok(())
}

/// Generates the partition for `config.seed` and summarizes one run.
#[allow(clippy::too_many_arguments)]
pub fn run_with_seed(
    plant: &PlantModel,
    assm: &AssumptionData,
    blend: &BlendingFn,
    config: &SimConfig,
    init: &InitialData,
    max_gap: f64,
    min_frac: f64,
    fit_window: (f64, f64),
) -> Result<(Trajectory, RunSummary)> {
    let partition = generate_partition(max_gap, config.horizon, config.seed, min_frac)?;
    let traj = simulate_closed_loop(plant, assm, blend, &partition, config, init)?;
    let summary = RunSummary::from_run(&traj, config, fit_window);
    Ok((traj, summary))
}

/// Runs `f` on every item on a pool of scoped threads; results keep the input order.
pub fn parallel_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let workers = thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(items.len().max(1));
    let chunk = items.len().div_ceil(workers).max(1);
    thread::scope(|scope| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|part| scope.spawn(|| part.iter().map(&f).collect::<Vec<R>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}

/// Candidate values searched by [`pilot_tune`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneGrid {
    pub sampling_gaps: Vec<f64>,
    pub hold_periods: Vec<f64>,
    pub predictor_steps: Vec<usize>,
}

impl Default for TuneGrid {
    fn default() -> Self {
        Self {
            sampling_gaps: vec![0.02, 0.01, 0.005],
            hold_periods: vec![0.1, 0.05, 0.025],
            predictor_steps: vec![16, 32, 64, 128],
        }
    }
}

impl TuneGrid {
    /// Search order: `N` ascending, then `T_s` and `T_H` descending.
    pub fn candidates(&self) -> Vec<(f64, f64, usize)> {
        let mut steps = self.predictor_steps.clone();
        steps.sort_unstable();
        let mut gaps = self.sampling_gaps.clone();
        gaps.sort_by(|a, b| b.total_cmp(a));
        let mut holds = self.hold_periods.clone();
        holds.sort_by(|a, b| b.total_cmp(a));
        let mut out = Vec::new();
        for &n in &steps {
            for &ts in &gaps {
                for &th in &holds {
                    out.push((ts, th, n));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneAttempt {
    #[serde(rename = "T_s")]
    pub sampling_gap: f64,
    #[serde(rename = "T_H")]
    pub hold_period: f64,
    #[serde(rename = "N")]
    pub predictor_steps: usize,
    pub pass: bool,
    pub summary: Option<RunSummary>,
    pub error: Option<String>,
}

/// Outcome of [`pilot_tune`]. `selected` is empty when no candidate passed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneReport {
    pub selected: Option<TuneAttempt>,
    pub attempts: Vec<TuneAttempt>,
}

/// Tries grid candidates in order until a fixed-seed run meets `criterion`.
#[allow(clippy::too_many_arguments)]
pub fn pilot_tune(
    plant: &PlantModel,
    assm: &AssumptionData,
    blend: &BlendingFn,
    init: &InitialData,
    grid: &TuneGrid,
    base: &SimConfig,
    min_frac: f64,
    criterion: &DecayCriterion,
) -> Result<TuneReport> {
    let candidates = grid.candidates();
    if candidates.is_empty() {
        return Err(Error::config("tuning grid is empty"));
    }
    let mut attempts = Vec::new();
    for (ts, th, n) in candidates {
        let config = SimConfig {
            hold_period: th,
            predictor_steps: n,
            dt_max: base.dt_max.min(th).min(ts),
            ..*base
        };
        let attempt = match run_with_seed(plant, assm, blend, &config, init, ts, min_frac, criterion.fit_window) {
            Ok((_, summary)) => TuneAttempt {
                sampling_gap: ts,
                hold_period: th,
                predictor_steps: n,
                pass: criterion.is_met(&summary),
                summary: Some(summary),
                error: None,
            },
            Err(Error::Config(msg)) => return Err(Error::Config(msg)),
            Err(e) => TuneAttempt {
                sampling_gap: ts,
                hold_period: th,
                predictor_steps: n,
                pass: false,
                summary: None,
                error: Some(e.to_string()),
            },
        };
        let pass = attempt.pass;
        attempts.push(attempt);
        if pass {
            return Ok(TuneReport {
                selected: attempts.last().cloned(),
                attempts,
            });
        }
    }
    Ok(TuneReport {
        selected: None,
        attempts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planar::build_planar_example;

    fn v2(a: f64, b: f64) -> Vector {
        Vector::from_vec(vec![a, b])
    }

    fn short_config(horizon: f64) -> SimConfig {
        SimConfig {
            horizon,
            ..SimConfig::default()
        }
    }

    #[test]
    fn zero_initial_data_stays_zero() {
        let (plant, assm, blend) = build_planar_example(0.01, 1.5, 0.5).unwrap();
        let plant = plant.with_delays(0.25, 0.25).unwrap();
        let init = InitialData::constant(&plant, v2(0.0, 0.0), v2(0.0, 0.0), Vector::zeros(1)).unwrap();
        let partition = generate_partition(0.01, 2.0, 1, 0.5).unwrap();
        let traj = simulate_closed_loop(&plant, &assm, &blend, &partition, &short_config(2.0), &init).unwrap();
        assert!(traj.rows.len() > 20);
        for row in &traj.rows {
            let m = row
                .x
                .amax()
                .max(row.z.amax())
                .max(row.w.amax())
                .max(row.u.amax())
                .max(row.norm);
            assert!(m <= 1e-12, "t = {}", row.t);
        }
    }

    #[test]
    fn resets_and_inputs_follow_the_contract() {
        let (plant, assm, blend) = build_planar_example(0.01, 1.5, 0.5).unwrap();
        let plant = plant.with_delays(0.25, 0.25).unwrap();
        let init = InitialData::constant(&plant, v2(1.0, -1.0), v2(0.0, 0.0), Vector::zeros(1)).unwrap();
        let partition = generate_partition(0.01, 3.0, 4, 0.5).unwrap();
        let config = short_config(3.0);
        let traj = simulate_closed_loop(&plant, &assm, &blend, &partition, &config, &init).unwrap();

        assert_eq!(
            traj.resets.len(),
            partition.times().iter().filter(|t| **t <= 3.0).count()
        );
        for reset in &traj.resets {
            assert_eq!(reset.sample_time, reset.t - 0.25);
            let y = plant.h(&reset.x_delayed);
            assert_eq!(reset.w_after[0].to_bits(), y[0].to_bits());
        }
        for (start, end, u) in traj.inputs.segments() {
            assert!(plant.input_box().contains(u));
            if start >= 0.0 && end <= 3.0 {
                assert!((end - start - 0.05).abs() < 1e-12);
            }
        }
        let bound = assm.v(&v2(1.0, -1.0)).max(1.0) + 1e-6;
        assert!(traj.node_max_vx <= bound);
        assert!(traj.rows.iter().all(|row| row.v_x <= bound));
        assert_eq!(traj.rows[0].t, 0.0);
        assert_eq!(traj.rows.last().unwrap().t, 3.0);
    }

    #[test]
    fn composite_norm_tracks_row_norm() {
        let (plant, assm, blend) = build_planar_example(0.01, 1.5, 0.5).unwrap();
        let plant = plant.with_delays(0.25, 0.25).unwrap();
        let init = InitialData::constant(&plant, v2(1.0, -1.0), v2(0.0, 0.0), Vector::zeros(1)).unwrap();
        let partition = generate_partition(0.01, 2.0, 0, 1.0).unwrap();
        let traj = simulate_closed_loop(&plant, &assm, &blend, &partition, &short_config(2.0), &init).unwrap();
        for row in traj.rows.iter().filter(|row| row.t >= 0.5) {
            let rebuilt = crate::trajectory::composite_norm(&traj, row.t, 0.25, 0.25).unwrap();
            assert!(rebuilt <= row.norm + 1e-12);
            assert!(row.norm - rebuilt < 1e-2, "t = {}", row.t);
        }
        let first = crate::trajectory::composite_norm(&traj, 0.0, 0.25, 0.25).unwrap();
        assert_eq!(first, traj.rows[0].norm);
        assert!((first - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn delay_free_run_uses_direct_law() {
        let (plant, assm, blend) = build_planar_example(0.01, 1.5, 0.5).unwrap();
        let init = InitialData::constant(&plant, v2(0.5, 0.5), v2(0.0, 0.0), Vector::zeros(1)).unwrap();
        let partition = generate_partition(0.01, 1.0, 0, 0.5).unwrap();
        let traj = simulate_closed_loop(&plant, &assm, &blend, &partition, &short_config(1.0), &init).unwrap();
        let row0 = &traj.rows[0];
        assert_eq!(row0.u[0], 0.0);
        assert_eq!(row0.w[0], 0.5);
        assert!((row0.norm - (0.5f64.sqrt())).abs() < 1e-15);
        let hold = traj.rows.iter().find(|row| row.t == 0.05).unwrap();
        assert_eq!(hold.u, hold_control_delay_free(&plant, &assm, &hold.z));
    }

    #[test]
    fn runs_are_deterministic() {
        let (plant, assm, blend) = build_planar_example(0.01, 1.5, 0.5).unwrap();
        let plant = plant.with_delays(0.1, 0.2).unwrap();
        let init = InitialData::constant(&plant, v2(1.0, -1.0), v2(0.3, 0.0), Vector::from_element(1, 0.1)).unwrap();
        let partition = generate_partition(0.01, 1.5, 9, 0.3).unwrap();
        let config = short_config(1.5);
        let a = simulate_closed_loop(&plant, &assm, &blend, &partition, &config, &init).unwrap();
        let b = simulate_closed_loop(&plant, &assm, &blend, &partition, &config, &init).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
    }

    #[test]
    fn invalid_inputs() {
        let (plant, assm, blend) = build_planar_example(0.01, 1.5, 0.5).unwrap();
        let plant = plant.with_delays(0.25, 0.25).unwrap();
        assert!(InitialData::constant(&plant, v2(0.0, 0.0), v2(0.0, 0.0), Vector::from_element(1, 5.0)).is_err());
        assert!(InitialData::new(
            &plant,
            InitialState::Table(vec![(-0.2, v2(0.0, 0.0)), (0.0, v2(0.0, 0.0))]),
            v2(0.0, 0.0),
            InputHistory::constant(-0.5, 0.0, Vector::zeros(1)).unwrap(),
            Vector::zeros(1),
        )
        .is_err());
        let init = InitialData::constant(&plant, v2(0.0, 0.0), v2(0.0, 0.0), Vector::zeros(1)).unwrap();
        let partition = generate_partition(0.01, 1.0, 0, 0.5).unwrap();
        assert!(simulate_closed_loop(&plant, &assm, &blend, &partition, &short_config(2.0), &init).is_err());
    }

    #[test]
    fn tuning_contracts() {
        let (plant, assm, blend) = build_planar_example(0.01, 1.5, 0.5).unwrap();
        let init = InitialData::constant(&plant, v2(1.0, -1.0), v2(0.0, 0.0), Vector::zeros(1)).unwrap();
        let base = short_config(5.0);
        let empty = TuneGrid {
            sampling_gaps: vec![],
            ..TuneGrid::default()
        };
        assert!(pilot_tune(
            &plant,
            &assm,
            &blend,
            &init,
            &empty,
            &base,
            0.5,
            &DecayCriterion::default()
        )
        .is_err());

        let absurd = TuneGrid {
            sampling_gaps: vec![0.01],
            hold_periods: vec![10.0],
            predictor_steps: vec![16],
        };
        let criterion = DecayCriterion {
            fit_window: (2.0, 5.0),
            ..DecayCriterion::default()
        };
        let report = pilot_tune(&plant, &assm, &blend, &init, &absurd, &base, 0.5, &criterion).unwrap();
        assert!(report.selected.is_none());
        assert_eq!(report.attempts.len(), 1);
    }

    #[test]
    fn candidate_order() {
        let c = TuneGrid::default().candidates();
        assert_eq!(c.len(), 36);
        assert_eq!(c[0], (0.02, 0.1, 16));
        assert_eq!(c[1], (0.02, 0.05, 16));
        assert_eq!(c[3], (0.01, 0.1, 16));
        assert_eq!(c[35], (0.005, 0.025, 128));
    }

    #[test]
    fn parallel_map_keeps_order() {
        let items: Vec<u64> = (0..37).collect();
        assert_eq!(
            parallel_map(&items, |x| x * 2),
            items.iter().map(|x| x * 2).collect::<Vec<_>>()
        );
        assert!(parallel_map(&Vec::<u64>::new(), |x| *x).is_empty());
    }
}
