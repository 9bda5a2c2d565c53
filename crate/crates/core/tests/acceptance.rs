//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use absorb_core::controller::{hold_control, hold_control_delay_free};
use absorb_core::planar::build_planar_example;
use absorb_core::simulator::{parallel_map, pilot_tune, run_with_seed, TuneGrid};
use absorb_core::trajectory::{DecayCriterion, RunSummary, Trajectory};
use absorb_core::verification::{
    check_contraction_a1, check_dissipation_37, check_h1, check_h2, check_h3, check_h4, check_h4_strong,
    check_zeta_bound, predictor_convergence_study, CheckReport, CheckSettings,
};
use absorb_core::{
    AssumptionData, BlendingFn, Damping, Error, FnDynamics, InitialData, InputBox, InputHistory, Matrix, PlantModel,
    SimConfig, Vector,
};

const ZETA: f64 = 0.01;
const B: f64 = 1.5;
const C: f64 = 0.5;
const T_S: f64 = 0.01;
const MIN_FRAC: f64 = 0.5;
const FIT: (f64, f64) = (20.0, 40.0);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

type Example = (PlantModel, AssumptionData, BlendingFn);

fn example(r: f64, tau: f64) -> Example {
    let (plant, assm, blend) = build_planar_example(ZETA, B, C).unwrap();
    (plant.with_delays(r, tau).unwrap(), assm, blend)
}

fn base_config(seed: u64) -> SimConfig {
    SimConfig {
        hold_period: 0.05,
        predictor_steps: 64,
        horizon: 40.0,
        dt_max: 1e-3,
        seed,
        record_dt: 0.1,
    }
}

fn initial(plant: &PlantModel) -> InitialData {
    InitialData::constant(
        plant,
        Vector::from_vec(vec![1.0, -1.0]),
        Vector::zeros(2),
        Vector::zeros(1),
    )
    .unwrap()
}

fn strict_decay() -> DecayCriterion {
    DecayCriterion {
        terminal_ratio: 1e-3,
        min_r2: Some(0.9),
        fit_window: FIT,
    }
}

fn describe(s: &RunSummary) -> String {
    format!(
        "terminal/initial = {:.3e}, sigma_hat = {:.4}, r2 = {:.4}",
        s.terminal_norm / s.initial_norm,
        s.sigma_hat.unwrap_or(f64::NAN),
        s.r2.unwrap_or(f64::NAN)
    )
}

fn report_line(r: &CheckReport) -> String {
    match r.worst_margin {
        Some(m) => format!("{} worst {:.3e} over {}", r.name, m, r.points_tested),
        None => format!("{} vacuous ({} skipped)", r.name, r.skipped),
    }
}

fn criterion_1() -> Outcome {
    let (plant, assm, _) = example(0.0, 0.0);
    let settings = CheckSettings::default();
    let start = Instant::now();
    let h1 = check_h1(&plant, &assm, &settings).unwrap();
    let h2 = check_h2(&plant, &assm, &settings).unwrap();
    let h3 = check_h3(&plant, &assm, &settings).unwrap();
    let strong = check_h4_strong(&plant, &assm, &settings).unwrap();
    let (h4_pass, h4_detail) = match check_h4(&plant, &assm, &settings) {
        Ok(r) => (r.pass && r.points_tested >= 10_000, report_line(&r)),
        Err(Error::InsufficientSamples { skipped, .. }) => (
            strong.pass && strong.points_tested >= 10_000,
            format!(
                "H4 side condition never met ({skipped} skipped), {}",
                report_line(&strong)
            ),
        ),
        Err(e) => (false, format!("H4 error: {e}")),
    };
    let elapsed = start.elapsed().as_secs_f64();
    let basic = [&h1, &h2, &h3].iter().all(|r| r.pass && r.points_tested >= 10_000);
    outcome(
        basic && h4_pass && elapsed < 60.0,
        format!(
            "{}; {}; {}; {}; {:.1} s",
            report_line(&h1),
            report_line(&h2),
            report_line(&h3),
            h4_detail,
            elapsed
        ),
    )
}

fn criterion_2() -> Outcome {
    let (plant, assm, blend) = example(0.0, 0.0);
    let settings = CheckSettings::default();
    let full = check_contraction_a1(&plant, &assm, &blend, &settings, None, Damping::Full).unwrap();
    let ablation = check_contraction_a1(&plant, &assm, &blend, &settings, None, Damping::Off).unwrap();
    let violated = ablation.worst_margin.is_some_and(|m| m > settings.tolerance);
    outcome(
        full.pass && full.points_tested >= 10_000 && violated,
        format!(
            "{}; ablation without damping {} (worst {:.3e})",
            report_line(&full),
            if violated { "violates" } else { "finds no violation" },
            ablation.worst_margin.unwrap_or(f64::NAN)
        ),
    )
}

fn criterion_3() -> Outcome {
    let (plant, assm, blend) = example(0.0, 0.0);
    let settings = CheckSettings::default();
    let r = check_dissipation_37(&plant, &assm, &blend, &settings, Damping::Full).unwrap();
    outcome(
        r.pass && r.points_tested >= 10_000,
        format!("{} for V(z) in [{B}, {}]", report_line(&r), settings.v_max),
    )
}

fn criterion_4() -> Outcome {
    let (plant, _, _) = example(0.5, 0.5);
    let hist = InputHistory::from_segments(
        vec![
            (-1.0, Vector::from_element(1, 0.3)),
            (-0.6, Vector::from_element(1, -0.5)),
            (-0.25, Vector::from_element(1, 0.2)),
        ],
        0.0,
    )
    .unwrap();
    let ns = [8, 16, 32, 64];
    let x0 = Vector::from_vec(vec![0.5, -0.3]);
    let study = predictor_convergence_study(&plant, &x0, &hist, 0.0, &ns, 1e-4).unwrap();
    let decreasing = study.windows(2).all(|w| w[1].error < w[0].error);
    let ratio = study[2].error / study[3].error;

    let scalar = FnDynamics::new(1, 1, 1, |x, _| -x, |x| x.clone(), |_| Matrix::identity(1, 1));
    let scalar = PlantModel::new(
        std::sync::Arc::new(scalar),
        InputBox::symmetric(1, 1.0).unwrap(),
        0.0,
        1.0,
    )
    .unwrap();
    let zero = InputHistory::constant(-1.0, 0.0, Vector::zeros(1)).unwrap();
    let oracle = predictor_convergence_study(&scalar, &Vector::from_element(1, 1.0), &zero, 0.0, &ns, 1e-4).unwrap();
    let oracle_gap = oracle
        .iter()
        .map(|p| (p.error - ((-1.0f64).exp() - (1.0 - 1.0 / p.steps as f64).powi(p.steps as i32)).abs()).abs())
        .fold(0.0, f64::max);
    let errors: Vec<String> = study.iter().map(|p| format!("{:.3e}", p.error)).collect();
    outcome(
        decreasing && (1.6..=2.4).contains(&ratio) && oracle_gap < 1e-12,
        format!(
            "e(8..64) = [{}], e(32)/e(64) = {ratio:.3}, scalar oracle gap {oracle_gap:.1e}",
            errors.join(", ")
        ),
    )
}

struct DelayedRuns {
    default_run: (Trajectory, RunSummary),
    sweep: Vec<(Trajectory, RunSummary)>,
    sweep_seconds: f64,
}

fn delayed_runs() -> DelayedRuns {
    let (plant, assm, blend) = example(0.25, 0.25);
    let init = initial(&plant);
    let default_run = run_with_seed(&plant, &assm, &blend, &base_config(0), &init, T_S, MIN_FRAC, FIT).unwrap();
    let seeds: Vec<u64> = (0..20).collect();
    let start = Instant::now();
    let sweep = parallel_map(&seeds, |&seed| {
        run_with_seed(&plant, &assm, &blend, &base_config(seed), &init, T_S, MIN_FRAC, FIT).unwrap()
    });
    DelayedRuns {
        default_run,
        sweep,
        sweep_seconds: start.elapsed().as_secs_f64(),
    }
}

fn criterion_5(runs: &DelayedRuns) -> Outcome {
    let summary = &runs.default_run.1;
    if strict_decay().is_met(summary) {
        return outcome(true, describe(summary));
    }
    let (plant, assm, blend) = example(0.25, 0.25);
    let report = pilot_tune(
        &plant,
        &assm,
        &blend,
        &initial(&plant),
        &TuneGrid::default(),
        &base_config(0),
        MIN_FRAC,
        &strict_decay(),
    )
    .unwrap();
    let best = report
        .attempts
        .iter()
        .filter_map(|a| a.summary.as_ref())
        .map(|s| s.terminal_norm / s.initial_norm)
        .fold(f64::INFINITY, f64::min);
    match report.selected {
        Some(sel) => outcome(
            true,
            format!(
                "default misses ({}); tune selects T_s = {}, T_H = {}, N = {}",
                describe(summary),
                sel.sampling_gap,
                sel.hold_period,
                sel.predictor_steps
            ),
        ),
        None => outcome(
            false,
            format!(
                "{}; tune: no passing triple in {} candidates (best terminal/initial {best:.3e})",
                describe(summary),
                report.attempts.len()
            ),
        ),
    }
}

fn criterion_6(runs: &DelayedRuns) -> Outcome {
    let passing = runs.sweep.iter().filter(|(_, s)| strict_decay().is_met(s)).count();
    let worst = runs
        .sweep
        .iter()
        .map(|(_, s)| s.terminal_norm / s.initial_norm)
        .fold(0.0, f64::max);
    outcome(
        passing == 20 && runs.sweep_seconds < 300.0,
        format!(
            "{passing}/20 seeds meet the decay thresholds (worst terminal/initial {worst:.3e}), {:.1} s",
            runs.sweep_seconds
        ),
    )
}

fn invariants_hold(plant: &PlantModel, assm: &AssumptionData, traj: &Trajectory, hold: f64) -> Result<(), String> {
    let c = assm.constants();
    let x0 = &traj.x_prehistory.last().unwrap().1;
    let z0 = &traj.rows[0].z;
    let vx_bound = assm.v(x0).max(c.absorbing_level) + 1e-6;
    let vz_bound = assm.v(z0).max(c.blend_upper) + 1e-6;
    if traj.node_max_vx > vx_bound {
        return Err(format!("V(x) reached {} > {vx_bound}", traj.node_max_vx));
    }
    if traj.node_max_vz > vz_bound {
        return Err(format!("V(z) reached {} > {vz_bound}", traj.node_max_vz));
    }
    for (start, end, u) in traj.inputs.segments() {
        if !plant.input_box().contains(u) {
            return Err(format!("input {u} at {start} leaves U"));
        }
        if start >= 0.0 && (end - start - hold).abs() > 1e-9 {
            return Err(format!("segment [{start}, {end}) is not one hold period"));
        }
    }
    for reset in &traj.resets {
        let y = plant.h(&reset.x_delayed);
        let exact = y
            .iter()
            .zip(reset.w_after.iter())
            .all(|(a, b)| a.to_bits() == b.to_bits());
        if !exact {
            return Err(format!("reset at {} is not exact", reset.t));
        }
    }
    Ok(())
}

fn criterion_7(runs: &DelayedRuns) -> Outcome {
    let (plant, assm, _) = example(0.25, 0.25);
    let all = std::iter::once(&runs.default_run).chain(runs.sweep.iter());
    let mut checked = 0;
    let mut max_vx: f64 = 0.0;
    let mut max_vz: f64 = 0.0;
    for (traj, _) in all {
        if let Err(msg) = invariants_hold(&plant, &assm, traj, 0.05) {
            return outcome(false, msg);
        }
        max_vx = max_vx.max(traj.node_max_vx);
        max_vz = max_vz.max(traj.node_max_vz);
        checked += 1;
    }
    outcome(
        true,
        format!("{checked} runs: max V(x) = {max_vx:.6}, max V(z) = {max_vz:.6}, inputs in U, resets bit-exact"),
    )
}

fn criterion_8() -> Outcome {
    let (plant, assm, blend) = example(0.0, 0.0);
    let init = initial(&plant);
    let (traj, summary) = run_with_seed(&plant, &assm, &blend, &base_config(0), &init, T_S, MIN_FRAC, FIT).unwrap();
    let mut holds = 0;
    let mut exact = true;
    for row in traj
        .rows
        .iter()
        .filter(|r| (r.t / 0.05 - (r.t / 0.05).round()).abs() < 1e-9)
    {
        let direct = hold_control_delay_free(&plant, &assm, &row.z);
        let predicted = hold_control(&plant, &assm, &row.z, &InputHistory::new(row.t), row.t, 64).unwrap();
        exact &= direct[0].to_bits() == predicted[0].to_bits() && row.u[0].to_bits() == direct[0].to_bits();
        holds += 1;
    }
    let decays = strict_decay().is_met(&summary);
    outcome(
        decays && exact,
        format!(
            "{}; hold law bit-exact at {holds} hold instants: {exact}",
            describe(&summary)
        ),
    )
}

fn criterion_9(runs: &DelayedRuns) -> Outcome {
    let (plant, assm, blend) = example(0.25, 0.25);
    let init = initial(&plant);
    let fine = SimConfig {
        dt_max: 5e-4,
        ..base_config(0)
    };
    let (fine_traj, _) = run_with_seed(&plant, &assm, &blend, &fine, &init, T_S, MIN_FRAC, FIT).unwrap();
    let coarse = runs.default_run.0.terminal_state().unwrap();
    let refined = fine_traj.terminal_state().unwrap();
    let rel = (coarse - refined).norm() / refined.norm();

    let (again, again_summary) =
        run_with_seed(&plant, &assm, &blend, &base_config(0), &init, T_S, MIN_FRAC, FIT).unwrap();
    let same_csv = again.to_csv() == runs.default_run.0.to_csv();
    let same_json =
        serde_json::to_string(&again_summary).unwrap() == serde_json::to_string(&runs.default_run.1).unwrap();
    outcome(
        rel < 1e-6 && same_csv && same_json,
        format!("terminal state change on halving dt_max {rel:.3e}; identical CSV {same_csv}, JSON {same_json}"),
    )
}

fn criterion_10() -> Outcome {
    let results = [0.01, 0.012, 0.02].map(|z| check_zeta_bound(z).unwrap());
    outcome(
        results == [true, true, false],
        format!(
            "0.01 -> {}, 0.012 -> {}, 0.02 -> {}",
            results[0], results[1], results[2]
        ),
    )
}

fn main() -> ExitCode {
    let mut results: Vec<(u32, Outcome)> = Vec::new();
    let mut record = |n: u32, o: Outcome| {
        println!(
            "criterion {n:>2}: {} | {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        results.push((n, o));
    };
    record(1, criterion_1());
    record(2, criterion_2());
    record(3, criterion_3());
    record(4, criterion_4());
    let runs = delayed_runs();
    record(5, criterion_5(&runs));
    record(6, criterion_6(&runs));
    record(7, criterion_7(&runs));
    record(8, criterion_8());
    record(9, criterion_9(&runs));
    record(10, criterion_10());

    let failed: Vec<u32> = results.iter().filter(|(_, o)| !o.pass).map(|(n, _)| *n).collect();
    if failed.is_empty() {
        println!("acceptance: all 10 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} of 10 criteria fail: {failed:?}", failed.len());
        ExitCode::FAILURE
    }
}
