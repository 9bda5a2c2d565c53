//! Library side of the `absorbctl` command line tool: configuration loading
//! and the five subcommands.

pub mod config;

use std::fs;
use std::path::{Path, PathBuf};

use absorb_core::simulator::{parallel_map, pilot_tune, run_with_seed, TuneGrid, TuneReport};
use absorb_core::trajectory::{DecayCriterion, RunSummary};
use absorb_core::verification::{predictor_convergence_study, run_standard_suite, CheckSettings, StudyPoint};
use absorb_core::SimConfig;
use serde::Serialize;

pub use config::{load_config, parse_config, parse_override, RunSetup, X0Spec};

/// Failure classes, one per non-zero exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Failed(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl From<absorb_core::Error> for CliError {
    fn from(e: absorb_core::Error) -> Self {
        match e {
            absorb_core::Error::Config(msg) => CliError::Config(msg),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Verify,
    PredictorStudy,
    Sweep,
    Tune,
}

/// Reference substep of the RK4 solution in the predictor study.
const STUDY_SUBSTEP: f64 = 1e-4;

fn criterion(setup: &RunSetup) -> DecayCriterion {
    DecayCriterion {
        terminal_ratio: 1e-3,
        min_r2: Some(0.9),
        fit_window: setup.fit_window(),
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| CliError::Runtime(e.to_string()))
}

/// Runs `command`, writing its artifacts into `out`. Returns the paths written
/// on success; a completed run whose result misses its target is `Failed`.
pub fn run(command: Command, setup: &RunSetup, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    match command {
        Command::Simulate => simulate(setup, out),
        Command::Verify => verify(setup, out),
        Command::PredictorStudy => predictor_study(setup, out),
        Command::Sweep => sweep(setup, out),
        Command::Tune => tune(setup, out),
    }
}

fn simulate(setup: &RunSetup, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let model = setup.build_model()?;
    let init = setup.initial_data(&model.plant)?;
    let (traj, summary) = run_with_seed(
        &model.plant,
        &model.assm,
        &model.blend,
        &setup.sim,
        &init,
        setup.t_s,
        setup.min_frac,
        setup.fit_window(),
    )?;
    Ok(vec![
        write_file(out, "trajectory.csv", &traj.to_csv())?,
        write_file(out, "summary.json", &to_json(&summary)?)?,
    ])
}

fn verify(setup: &RunSetup, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let model = setup.build_model()?;
    let settings = CheckSettings {
        points: setup.samples,
        seed: setup.sim.seed,
        ..CheckSettings::default()
    };
    let report = run_standard_suite(&model.plant, &model.assm, &model.blend, &settings, Some(setup.zeta))?;
    let path = write_file(out, "verify.json", &to_json(&report)?)?;
    if report.all_pass {
        Ok(vec![path])
    } else {
        let failed: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.as_str())
            .collect();
        Err(CliError::Failed(format!("checks failed: {}", failed.join(", "))))
    }
}

fn study_csv(points: &[StudyPoint]) -> String {
    let mut csv = String::from("N,error\n");
    for p in points {
        csv.push_str(&format!("{},{:.16e}\n", p.steps, p.error));
    }
    csv
}

fn predictor_study(setup: &RunSetup, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let model = setup.build_model()?;
    if model.plant.is_delay_free() {
        return Err(CliError::Config("the predictor study needs r + tau > 0".into()));
    }
    let init = setup.initial_data(&model.plant)?;
    let (_, x_now) = init.x0().last();
    let points = predictor_convergence_study(&model.plant, x_now, init.u0(), 0.0, &setup.study_n, STUDY_SUBSTEP)?;
    Ok(vec![write_file(out, "predictor_study.csv", &study_csv(&points))?])
}

#[derive(Debug, Serialize)]
struct SweepReport {
    criterion: DecayCriterion,
    passing: usize,
    all_pass: bool,
    runs: Vec<SweepRun>,
}

#[derive(Debug, Serialize)]
struct SweepRun {
    seed: u64,
    pass: bool,
    summary: Option<RunSummary>,
    error: Option<String>,
}

fn sweep(setup: &RunSetup, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let model = setup.build_model()?;
    let init = setup.initial_data(&model.plant)?;
    let criterion = criterion(setup);
    let seeds: Vec<u64> = (0..setup.sweep_seeds).map(|i| setup.sim.seed.wrapping_add(i)).collect();
    let results = parallel_map(&seeds, |&seed| {
        let config = SimConfig { seed, ..setup.sim };
        run_with_seed(
            &model.plant,
            &model.assm,
            &model.blend,
            &config,
            &init,
            setup.t_s,
            setup.min_frac,
            criterion.fit_window,
        )
    });
    let mut runs = Vec::with_capacity(seeds.len());
    for (seed, result) in seeds.iter().zip(results) {
        runs.push(match result {
            Ok((_, summary)) => SweepRun {
                seed: *seed,
                pass: criterion.is_met(&summary),
                summary: Some(summary),
                error: None,
            },
            Err(absorb_core::Error::Config(msg)) => return Err(CliError::Config(msg)),
            Err(e) => SweepRun {
                seed: *seed,
                pass: false,
                summary: None,
                error: Some(e.to_string()),
            },
        });
    }
    let passing = runs.iter().filter(|r| r.pass).count();
    let report = SweepReport {
        criterion,
        passing,
        all_pass: passing == runs.len(),
        runs,
    };
    let path = write_file(out, "sweep.json", &to_json(&report)?)?;
    if report.all_pass {
        Ok(vec![path])
    } else {
        Err(CliError::Failed(format!(
            "{passing} of {} seeds meet the decay criterion",
            report.runs.len()
        )))
    }
}

#[derive(Debug, Serialize)]
struct TuneOutput {
    criterion: DecayCriterion,
    grid: TuneGrid,
    #[serde(flatten)]
    report: TuneReport,
}

fn tune(setup: &RunSetup, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let model = setup.build_model()?;
    let init = setup.initial_data(&model.plant)?;
    let criterion = criterion(setup);
    let grid = TuneGrid::default();
    let report = pilot_tune(
        &model.plant,
        &model.assm,
        &model.blend,
        &init,
        &grid,
        &setup.sim,
        setup.min_frac,
        &criterion,
    )?;
    let selected = report.selected.is_some();
    let output = TuneOutput {
        criterion,
        grid,
        report,
    };
    let path = write_file(out, "tune.json", &to_json(&output)?)?;
    if selected {
        Ok(vec![path])
    } else {
        Err(CliError::Failed(format!(
            "no candidate in {} met the decay criterion",
            output.report.attempts.len()
        )))
    }
}
