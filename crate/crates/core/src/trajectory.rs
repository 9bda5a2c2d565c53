//! Recorded closed-loop runs, composite norms and decay-rate fits.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::history::InputHistory;
use crate::model::Vector;
use crate::schedule::SimConfig;

/// Norms at or below this are dropped before taking logarithms.
pub const NORM_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRow {
    pub t: f64,
    pub x: Vector,
    pub z: Vector,
    pub w: Vector,
    /// Input applied at `t` (the held value, not the delayed one).
    pub u: Vector,
    pub v_x: f64,
    pub v_z: f64,
    /// `||x_t|| + |z(t)| + ||u~_t||` evaluated on the integrator's histories.
    pub norm: f64,
}

/// One application of the output reset `w <- y(tau_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResetRecord {
    pub t: f64,
    /// Time `tau_i - r` at which the plant state was measured.
    pub sample_time: f64,
    pub x_delayed: Vector,
    pub y: Vector,
    pub w_after: Vector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub rows: Vec<TrajectoryRow>,
    pub resets: Vec<ResetRecord>,
    /// Every input segment, including the initial one on `[-r - tau, 0)`.
    pub inputs: InputHistory,
    /// Initial state history on `[-r, 0]`.
    pub x_prehistory: Vec<(f64, Vector)>,
    /// Largest `V(x)` over all integrator nodes.
    pub node_max_vx: f64,
    /// Largest `V(z)` over all integrator nodes.
    pub node_max_vz: f64,
}

impl Trajectory {
    pub fn initial_norm(&self) -> f64 {
        self.rows.first().map_or(0.0, |r| r.norm)
    }

    pub fn terminal_norm(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.norm)
    }

    pub fn terminal_state(&self) -> Option<&Vector> {
        self.rows.last().map(|r| &r.x)
    }

    /// CSV with header `t,x1..xn,z1..zn,w1..wk,u1..um,Vx,Vz,norm`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let Some(first) = self.rows.first() else {
            out.push_str("t,Vx,Vz,norm\n");
            return out;
        };
        let mut header = vec!["t".to_string()];
        for (prefix, len) in [
            ("x", first.x.len()),
            ("z", first.z.len()),
            ("w", first.w.len()),
            ("u", first.u.len()),
        ] {
            header.extend((1..=len).map(|i| format!("{prefix}{i}")));
        }
        header.extend(["Vx", "Vz", "norm"].map(String::from));
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let fields = std::iter::once(row.t)
                .chain(row.x.iter().copied())
                .chain(row.z.iter().copied())
                .chain(row.w.iter().copied())
                .chain(row.u.iter().copied())
                .chain([row.v_x, row.v_z, row.norm]);
            for (i, value) in fields.enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write!(out, "{value:.16e}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Composite norm at a recorded instant, rebuilt from the rows, the
/// initial state history and the input record.
///
/// The state supremum is taken over the piecewise-linear interpolant of the
/// recorded rows, so it can be smaller than the norm column of a row, which
/// the simulator evaluates on every integrator node.
pub fn composite_norm(traj: &Trajectory, t: f64, r: f64, tau: f64) -> Result<f64> {
    let (first, last) = match (traj.rows.first(), traj.rows.last()) {
        (Some(a), Some(b)) => (a.t, b.t),
        _ => {
            return Err(Error::Coverage {
                t,
                start: 0.0,
                end: 0.0,
            })
        }
    };
    if !(t >= first && t <= last) {
        return Err(Error::Coverage {
            t,
            start: first,
            end: last,
        });
    }
    let mut nodes: Vec<(f64, &Vector)> = traj
        .x_prehistory
        .iter()
        .filter(|(s, _)| *s < first)
        .map(|(s, x)| (*s, x))
        .collect();
    nodes.extend(traj.rows.iter().map(|row| (row.t, &row.x)));
    let start = nodes[0].0;
    if t - r < start {
        return Err(Error::Coverage {
            t: t - r,
            start,
            end: last,
        });
    }
    let interp = |s: f64| -> f64 {
        let i = nodes.partition_point(|(q, _)| *q < s);
        if nodes[i].0 == s {
            return nodes[i].1.norm();
        }
        let (t0, x0) = nodes[i - 1];
        let (t1, x1) = nodes[i];
        let theta = (s - t0) / (t1 - t0);
        (x0 + (x1 - x0) * theta).norm()
    };
    let mut sup_x = interp(t - r).max(interp(t));
    for (s, x) in &nodes {
        if *s > t - r && *s < t {
            sup_x = sup_x.max(x.norm());
        }
    }
    let i = traj.rows.partition_point(|row| row.t < t);
    let z_norm = if traj.rows[i].t == t {
        traj.rows[i].z.norm()
    } else {
        let (a, b) = (&traj.rows[i - 1], &traj.rows[i]);
        let theta = (t - a.t) / (b.t - a.t);
        (&a.z + (&b.z - &a.z) * theta).norm()
    };
    let sup_u = traj.inputs.sup_norm(t - r - tau, t)?;
    Ok(sup_x + z_norm + sup_u)
}

/// Least-squares fit of `ln(norm)` against `t` over rows in `[t0, t1]`.
/// Returns `(sigma_hat, r2)` with `sigma_hat` the negated slope.
pub fn fit_decay_rate(traj: &Trajectory, t0: f64, t1: f64) -> Result<(f64, f64)> {
    let points: Vec<(f64, f64)> = traj
        .rows
        .iter()
        .filter(|row| row.t >= t0 && row.t <= t1 && row.norm > NORM_FLOOR)
        .map(|row| (row.t, row.norm.ln()))
        .collect();
    fit_log_linear(&points)
}

pub(crate) fn fit_log_linear(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 3 {
        return Err(Error::InsufficientData { usable: points.len() });
    }
    let n = points.len() as f64;
    let mean_t = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut stt, mut sty, mut syy) = (0.0, 0.0, 0.0);
    for (t, y) in points {
        let (dt, dy) = (t - mean_t, y - mean_y);
        stt += dt * dt;
        sty += dt * dy;
        syy += dy * dy;
    }
    if stt == 0.0 {
        return Err(Error::InsufficientData { usable: 1 });
    }
    // a flat series is fitted exactly by a flat line
    let (lo, hi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        (lo.min(p.1), hi.max(p.1))
    });
    if hi - lo <= 1e-12 * (1.0 + mean_y.abs()) {
        return Ok((0.0, 1.0));
    }
    let sigma = -sty / stt;
    let r2 = (sty * sty) / (stt * syy);
    Ok((sigma, r2))
}

/// Pass/fail thresholds for a decaying run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayCriterion {
    /// Terminal norm must drop below this fraction of the initial norm.
    pub terminal_ratio: f64,
    pub min_r2: Option<f64>,
    pub fit_window: (f64, f64),
}

impl Default for DecayCriterion {
    fn default() -> Self {
        Self {
            terminal_ratio: 1e-3,
            min_r2: None,
            fit_window: (20.0, 40.0),
        }
    }
}

impl DecayCriterion {
    pub fn is_met(&self, summary: &RunSummary) -> bool {
        summary.sigma_hat.is_some_and(|s| s > 0.0)
            && summary.terminal_norm < self.terminal_ratio * summary.initial_norm
            && self.min_r2.is_none_or(|m| summary.r2.is_some_and(|r2| r2 > m))
    }
}

/// JSON run summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub sigma_hat: Option<f64>,
    pub r2: Option<f64>,
    pub terminal_norm: f64,
    pub initial_norm: f64,
    #[serde(rename = "max_Vx")]
    pub max_vx: f64,
    #[serde(rename = "max_Vz")]
    pub max_vz: f64,
    pub partition_seed: u64,
    pub config: SimConfig,
}

impl RunSummary {
    /// Summarizes a run; a fit that lacks data leaves `sigma_hat` and `r2` empty.
    pub fn from_run(traj: &Trajectory, config: &SimConfig, fit_window: (f64, f64)) -> Self {
        let fit = fit_decay_rate(traj, fit_window.0, fit_window.1).ok();
        Self {
            sigma_hat: fit.map(|f| f.0),
            r2: fit.map(|f| f.1),
            terminal_norm: traj.terminal_norm(),
            initial_norm: traj.initial_norm(),
            max_vx: traj.node_max_vx,
            max_vz: traj.node_max_vz,
            partition_seed: config.seed,
            config: *config,
        }
    }
}
