//! Run configuration: a flat TOML file, overridden by `--set key=value`.

use std::path::Path;

use absorb_core::planar::build_planar_example;
use absorb_core::simulator::InitialState;
use absorb_core::{AssumptionData, BlendingFn, InitialData, InputHistory, PlantModel, SimConfig, Vector};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    model: Option<String>,
    zeta: Option<f64>,
    b: Option<f64>,
    c: Option<f64>,
    r: Option<f64>,
    tau: Option<f64>,
    #[serde(rename = "T_s")]
    t_s: Option<f64>,
    #[serde(rename = "T_H")]
    t_h: Option<f64>,
    #[serde(rename = "N")]
    n: Option<i64>,
    horizon: Option<f64>,
    dt_max: Option<f64>,
    record_dt: Option<f64>,
    seed: Option<i64>,
    x0: Option<X0Spec>,
    z0: Option<Vec<f64>>,
    u0_segments: Option<Vec<Vec<f64>>>,
    min_frac: Option<f64>,
    sweep_seeds: Option<i64>,
    study_n: Option<Vec<i64>>,
    samples: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum X0Spec {
    Constant(Vec<f64>),
    /// Rows `[theta, x1, ..., xn]`.
    Table(Vec<Vec<f64>>),
}

/// Fully resolved settings with every default applied.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSetup {
    pub model: String,
    pub zeta: f64,
    pub b: f64,
    pub c: f64,
    pub r: f64,
    pub tau: f64,
    #[serde(rename = "T_s")]
    pub t_s: f64,
    pub min_frac: f64,
    pub sim: SimConfig,
    pub x0: X0Spec,
    pub z0: Vec<f64>,
    /// Rows `[start, u1, ..., um]`; the last segment ends at 0.
    pub u0_segments: Option<Vec<Vec<f64>>>,
    pub sweep_seeds: u64,
    pub study_n: Vec<usize>,
    pub samples: usize,
}

pub struct Model {
    pub plant: PlantModel,
    pub assm: AssumptionData,
    pub blend: BlendingFn,
}

fn positive_count(name: &str, value: i64) -> Result<usize, CliError> {
    if value < 1 {
        return Err(CliError::Config(format!("{name} must be at least 1, got {value}")));
    }
    Ok(value as usize)
}

fn non_negative(name: &str, value: i64) -> Result<u64, CliError> {
    u64::try_from(value).map_err(|_| CliError::Config(format!("{name} must be non-negative, got {value}")))
}

/// Parses `key=value`. The value is read as a TOML value; anything that does
/// not parse is taken as a bare string.
pub fn parse_override(text: &str) -> Result<(String, toml::Value), CliError> {
    let (key, value) = text
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override '{text}' is not of the form key=value")))?;
    let key = key.trim();
    if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(CliError::Config(format!("invalid override key '{key}'")));
    }
    let value = value.trim();
    if value.contains(['\n', '\r']) {
        return Err(CliError::Config(format!(
            "override value for '{key}' spans several lines"
        )));
    }
    let parsed = format!("v = {value}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(value.to_string()));
    Ok((key.to_string(), parsed))
}

/// Merges overrides into the file contents and resolves defaults.
pub fn parse_config(text: &str, overrides: &[String]) -> Result<RunSetup, CliError> {
    let mut table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| CliError::Config(format!("malformed config: {}", e.message())))?;
    for item in overrides {
        let (key, value) = parse_override(item)?;
        table.insert(key, value);
    }
    let raw: RawConfig = toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| CliError::Config(e.message().to_string()))?;
    resolve(raw)
}

pub fn load_config(path: &Path, overrides: &[String]) -> Result<RunSetup, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text, overrides)
}

fn resolve(raw: RawConfig) -> Result<RunSetup, CliError> {
    let model = raw.model.unwrap_or_else(|| "planar".into());
    if model != "planar" {
        return Err(CliError::Config(format!(
            "unknown model '{model}'; the built-in model is 'planar'"
        )));
    }
    let defaults = SimConfig::default();
    let sim = SimConfig {
        hold_period: raw.t_h.unwrap_or(defaults.hold_period),
        predictor_steps: positive_count("N", raw.n.unwrap_or(defaults.predictor_steps as i64))?,
        horizon: raw.horizon.unwrap_or(defaults.horizon),
        dt_max: raw.dt_max.unwrap_or(defaults.dt_max),
        seed: non_negative("seed", raw.seed.unwrap_or(0))?,
        record_dt: raw.record_dt.unwrap_or(defaults.record_dt),
    };
    sim.validate().map_err(CliError::from)?;
    let study_n = raw
        .study_n
        .unwrap_or_else(|| vec![8, 16, 32, 64])
        .into_iter()
        .map(|n| positive_count("study_n entry", n))
        .collect::<Result<Vec<_>, _>>()?;
    let setup = RunSetup {
        model,
        zeta: raw.zeta.unwrap_or(0.01),
        b: raw.b.unwrap_or(1.5),
        c: raw.c.unwrap_or(0.5),
        r: raw.r.unwrap_or(0.25),
        tau: raw.tau.unwrap_or(0.25),
        t_s: raw.t_s.unwrap_or(0.01),
        min_frac: raw.min_frac.unwrap_or(0.5),
        sim,
        x0: raw.x0.unwrap_or(X0Spec::Constant(vec![1.0, -1.0])),
        z0: raw.z0.unwrap_or_else(|| vec![0.0, 0.0]),
        u0_segments: raw.u0_segments,
        sweep_seeds: positive_count("sweep_seeds", raw.sweep_seeds.unwrap_or(20))? as u64,
        study_n,
        samples: positive_count("samples", raw.samples.unwrap_or(10_000))?,
    };
    for (name, value) in [("r", setup.r), ("tau", setup.tau)] {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(CliError::Config(format!(
                "{name} must be a non-negative number, got {value}"
            )));
        }
    }
    if !(setup.t_s > 0.0 && setup.t_s.is_finite()) {
        return Err(CliError::Config(format!("T_s must be positive, got {}", setup.t_s)));
    }
    if !(setup.min_frac > 0.0 && setup.min_frac <= 1.0) {
        return Err(CliError::Config(format!(
            "min_frac must lie in (0, 1], got {}",
            setup.min_frac
        )));
    }
    Ok(setup)
}

impl RunSetup {
    /// Fit window for decay estimates: the second half of the horizon.
    pub fn fit_window(&self) -> (f64, f64) {
        (0.5 * self.sim.horizon, self.sim.horizon)
    }

    pub fn build_model(&self) -> Result<Model, CliError> {
        let (plant, assm, blend) = build_planar_example(self.zeta, self.b, self.c)?;
        let plant = plant.with_delays(self.r, self.tau)?;
        Ok(Model { plant, assm, blend })
    }

    pub fn initial_state(&self) -> InitialState {
        match &self.x0 {
            X0Spec::Constant(x) => InitialState::Constant(Vector::from_column_slice(x)),
            X0Spec::Table(rows) => InitialState::Table(
                rows.iter()
                    .map(|row| {
                        (
                            row.first().copied().unwrap_or(f64::NAN),
                            Vector::from_column_slice(row.get(1..).unwrap_or(&[])),
                        )
                    })
                    .collect(),
            ),
        }
    }

    pub fn input_history(&self, plant: &PlantModel) -> Result<InputHistory, CliError> {
        let window = plant.total_delay();
        match &self.u0_segments {
            None if window > 0.0 => Ok(InputHistory::constant(-window, 0.0, Vector::zeros(plant.m()))?),
            None => Ok(InputHistory::new(0.0)),
            Some(rows) if window == 0.0 && !rows.is_empty() => {
                Err(CliError::Config("u0_segments must be empty when r + tau = 0".into()))
            }
            Some(rows) if rows.is_empty() => Ok(InputHistory::new(-window)),
            Some(rows) => {
                let segments = rows
                    .iter()
                    .map(|row| match row.split_first() {
                        Some((start, values)) if !values.is_empty() => Ok((*start, Vector::from_column_slice(values))),
                        _ => Err(CliError::Config(
                            "each u0_segments row needs a start time and a value".into(),
                        )),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(InputHistory::from_segments(segments, 0.0)?)
            }
        }
    }

    pub fn initial_data(&self, plant: &PlantModel) -> Result<InitialData, CliError> {
        Ok(InitialData::new(
            plant,
            self.initial_state(),
            Vector::from_column_slice(&self.z0),
            self.input_history(plant)?,
            Vector::zeros(plant.k()),
        )?)
    }
}
