//! Sampling partitions and run configuration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Increasing sampling instants `0 = t_0 < t_1 < ...` with gaps at most
/// `max_gap` (up to a relative rounding allowance of `1e-12`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingPartition {
    times: Vec<f64>,
    max_gap: f64,
}

impl SamplingPartition {
    pub fn new(times: Vec<f64>, max_gap: f64) -> Result<Self> {
        if !(max_gap > 0.0 && max_gap.is_finite()) {
            return Err(Error::config(format!(
                "sampling gap bound must be positive, got {max_gap}"
            )));
        }
        if times.first() != Some(&0.0) {
            return Err(Error::config("a sampling partition must start at t = 0"));
        }
        for pair in times.windows(2) {
            let gap = pair[1] - pair[0];
            // grid points i * T_s differ from exact multiples by rounding
            if !(gap > 0.0 && gap <= max_gap + 1e-12 * pair[1].abs().max(1.0)) {
                return Err(Error::config(format!(
                    "sampling gap {gap} at t = {} is outside (0, {max_gap}]",
                    pair[0]
                )));
            }
        }
        Ok(Self { times, max_gap })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Declared gap bound `T_s`.
    pub fn max_gap(&self) -> f64 {
        self.max_gap
    }

    pub fn last(&self) -> f64 {
        *self.times.last().unwrap()
    }
}

/// Random partition with gaps drawn uniformly from `[min_frac * T_s, T_s]`.
///
/// `min_frac = 1` yields the uniform grid `i * T_s`. The last instant is at
/// or beyond `horizon`.
pub fn generate_partition(max_gap: f64, horizon: f64, seed: u64, min_frac: f64) -> Result<SamplingPartition> {
    if !(max_gap > 0.0 && max_gap.is_finite() && horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::config(format!(
            "partition needs T_s > 0 and horizon > 0, got T_s = {max_gap}, horizon = {horizon}"
        )));
    }
    if !(min_frac > 0.0 && min_frac <= 1.0) {
        return Err(Error::config(format!("min_frac must lie in (0, 1], got {min_frac}")));
    }
    let mut times = vec![0.0];
    if min_frac == 1.0 {
        let mut i = 1u64;
        while *times.last().unwrap() < horizon {
            times.push(i as f64 * max_gap);
            i += 1;
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lo = min_frac * max_gap;
        let mut t = 0.0;
        while t < horizon {
            t += rng.random_range(lo..=max_gap);
            times.push(t);
        }
    }
    SamplingPartition::new(times, max_gap)
}

/// Closed-loop simulation settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Hold period `T_H`.
    pub hold_period: f64,
    /// Euler predictor step count `N`.
    pub predictor_steps: usize,
    pub horizon: f64,
    /// Largest integrator substep.
    pub dt_max: f64,
    /// Partition seed, carried into summaries.
    pub seed: u64,
    pub record_dt: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            hold_period: 0.05,
            predictor_steps: 64,
            horizon: 40.0,
            dt_max: 1e-3,
            seed: 0,
            record_dt: 0.1,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.hold_period > 0.0 && self.hold_period.is_finite()) {
            return Err(Error::config(format!("T_H must be positive, got {}", self.hold_period)));
        }
        if self.predictor_steps < 1 {
            return Err(Error::config("N must be at least 1"));
        }
        if !(self.dt_max > 0.0 && self.dt_max <= self.hold_period) {
            return Err(Error::config(format!(
                "dt_max must lie in (0, T_H], got {} with T_H = {}",
                self.dt_max, self.hold_period
            )));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::config(format!("horizon must be positive, got {}", self.horizon)));
        }
        if !(self.record_dt > 0.0 && self.record_dt.is_finite()) {
            return Err(Error::config(format!(
                "record_dt must be positive, got {}",
                self.record_dt
            )));
        }
        Ok(())
    }
}
