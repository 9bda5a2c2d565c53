//! Delay histories.
//!
//! [`InputHistory`] is a right-open piecewise-constant record of the applied
//! control; its integrals are exact sums over segment overlaps.
//! [`StateHistory`] stores integrator nodes and interpolates linearly.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::model::Vector;

/// Piecewise-constant input record on `[t_min, t_end)`.
///
/// Segment `i` is active on `[start_i, start_{i+1})`, the last one on
/// `[start_last, t_end)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InputHistory {
    starts: Vec<f64>,
    values: Vec<Vector>,
    t_min: f64,
    t_end: f64,
}

impl InputHistory {
    /// Empty history whose coverage is `[t_min, t_min)`.
    pub fn new(t_min: f64) -> Self {
        Self {
            starts: Vec::new(),
            values: Vec::new(),
            t_min,
            t_end: t_min,
        }
    }

    /// Single constant segment on `[t_min, t_end)`.
    pub fn constant(t_min: f64, t_end: f64, value: Vector) -> Result<Self> {
        let mut hist = Self::new(t_min);
        hist.push(t_min, value, t_end)?;
        Ok(hist)
    }

    /// Builds a history from `(start, value)` pairs ending at `t_end`.
    pub fn from_segments(segments: Vec<(f64, Vector)>, t_end: f64) -> Result<Self> {
        let Some(first) = segments.first() else {
            return Err(Error::config("input history needs at least one segment"));
        };
        let mut hist = Self::new(first.0);
        let mut iter = segments.into_iter().peekable();
        while let Some((start, value)) = iter.next() {
            let end = iter.peek().map_or(t_end, |next| next.0);
            hist.push(start, value, end)?;
        }
        Ok(hist)
    }

    /// Appends a segment `[start, end)`. `start` must equal the current end
    /// of coverage.
    pub fn push(&mut self, start: f64, value: Vector, end: f64) -> Result<()> {
        if start != self.t_end {
            return Err(Error::config(format!(
                "input segment must start at the end of coverage {}, got {start}",
                self.t_end
            )));
        }
        if !(end > start) || !end.is_finite() {
            return Err(Error::config(format!("input segment [{start}, {end}) is empty")));
        }
        if let Some(prev) = self.values.last() {
            if prev.len() != value.len() {
                return Err(Error::config("input segments must share one dimension"));
            }
        }
        self.starts.push(start);
        self.values.push(value);
        self.t_end = end;
        Ok(())
    }

    /// `(t_min, t_end)`; values are defined on `[t_min, t_end)`.
    pub fn coverage(&self) -> (f64, f64) {
        (self.t_min, self.t_end)
    }

    pub fn len(&self) -> usize {
        self.starts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.starts.is_empty()
    }

    /// `(start, end, value)` for every segment.
    pub fn segments(&self) -> impl Iterator<Item = (f64, f64, &Vector)> + '_ {
        (0..self.starts.len()).map(move |i| (self.starts[i], self.segment_end(i), &self.values[i]))
    }

    fn segment_end(&self, i: usize) -> f64 {
        self.starts.get(i + 1).copied().unwrap_or(self.t_end)
    }

    fn coverage_error(&self, t: f64) -> Error {
        Error::Coverage {
            t,
            start: self.t_min,
            end: self.t_end,
        }
    }

    /// Index of the segment active at `t` (last with `start <= t`).
    fn index_at(&self, t: f64) -> Option<usize> {
        self.starts.partition_point(|s| *s <= t).checked_sub(1)
    }

    /// Value active at `t`, with right-open segments.
    pub fn value_at(&self, t: f64) -> Result<&Vector> {
        if !(t >= self.t_min && t < self.t_end) {
            return Err(self.coverage_error(t));
        }
        let i = self.index_at(t).ok_or_else(|| self.coverage_error(t))?;
        Ok(&self.values[i])
    }

    /// Pieces `(duration, value)` of the history over `[t0, t1]`. Adjacent
    /// segments carrying bit-identical values are merged, so splitting a
    /// segment never changes downstream sums.
    pub fn pieces(&self, t0: f64, t1: f64) -> Result<Vec<(f64, &Vector)>> {
        if !(t0 <= t1) {
            return Err(Error::config(format!("integration interval [{t0}, {t1}] is reversed")));
        }
        if t0 < self.t_min || t0 > self.t_end {
            return Err(self.coverage_error(t0));
        }
        if t1 > self.t_end {
            return Err(self.coverage_error(t1));
        }
        let mut out: Vec<(f64, f64, &Vector)> = Vec::new();
        if t0 == t1 {
            return Ok(Vec::new());
        }
        let first = self.index_at(t0).ok_or_else(|| self.coverage_error(t0))?;
        for i in first..self.starts.len() {
            let lo = self.starts[i].max(t0);
            let hi = self.segment_end(i).min(t1);
            if hi <= lo {
                if self.starts[i] >= t1 {
                    break;
                }
                continue;
            }
            let value = &self.values[i];
            match out.last_mut() {
                Some(last) if bit_equal(last.2, value) => last.1 = hi,
                _ => out.push((lo, hi, value)),
            }
        }
        Ok(out.into_iter().map(|(lo, hi, v)| (hi - lo, v)).collect())
    }

    /// Exact integral of the history over `[t0, t1]`.
    pub fn integral(&self, t0: f64, t1: f64) -> Result<Vector> {
        let dim = self.values.first().map_or(0, |v| v.len());
        let mut acc = Vector::zeros(dim);
        for (dt, value) in self.pieces(t0, t1)? {
            acc.axpy(dt, value, 1.0);
        }
        Ok(acc)
    }

    /// `sup |u|` over `[t0, t1)`; zero for an empty interval.
    pub fn sup_norm(&self, t0: f64, t1: f64) -> Result<f64> {
        if t1 <= t0 {
            return Ok(0.0);
        }
        if t0 < self.t_min || t1 > self.t_end {
            return Err(self.coverage_error(if t0 < self.t_min { t0 } else { t1 }));
        }
        Ok(self
            .segments()
            .filter(|(s, e, _)| *s < t1 && *e > t0)
            .map(|(_, _, v)| v.norm())
            .fold(0.0, f64::max))
    }

    /// First segment start strictly after `t`.
    pub fn next_start_after(&self, t: f64) -> Option<f64> {
        let i = self.starts.partition_point(|s| *s <= t);
        self.starts.get(i).copied()
    }
}

fn bit_equal(a: &Vector, b: &Vector) -> bool {
    a.len() == b.len() && a.iter().zip(b.iter()).all(|(x, y)| x.to_bits() == y.to_bits())
}

/// Sampled state record with linear interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct StateHistory {
    times: VecDeque<f64>,
    states: VecDeque<Vector>,
}

impl StateHistory {
    pub fn new(t: f64, x: Vector) -> Self {
        Self {
            times: VecDeque::from([t]),
            states: VecDeque::from([x]),
        }
    }

    /// Constant history on `[t0, t1]`.
    pub fn constant(t0: f64, t1: f64, x: Vector) -> Result<Self> {
        let mut hist = Self::new(t0, x.clone());
        if t1 > t0 {
            hist.push(t1, x)?;
        } else if t1 < t0 {
            return Err(Error::config("state history interval is reversed"));
        }
        Ok(hist)
    }

    pub fn from_samples(samples: Vec<(f64, Vector)>) -> Result<Self> {
        let mut iter = samples.into_iter();
        let (t, x) = iter
            .next()
            .ok_or_else(|| Error::config("state history needs at least one sample"))?;
        let mut hist = Self::new(t, x);
        for (t, x) in iter {
            hist.push(t, x)?;
        }
        Ok(hist)
    }

    pub fn push(&mut self, t: f64, x: Vector) -> Result<()> {
        let last = *self.times.back().expect("history is never empty");
        if !(t > last) {
            return Err(Error::config(format!(
                "state sample times must increase: {t} after {last}"
            )));
        }
        self.times.push_back(t);
        self.states.push_back(x);
        Ok(())
    }

    pub fn coverage(&self) -> (f64, f64) {
        (self.times[0], *self.times.back().unwrap())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn last(&self) -> (f64, &Vector) {
        (*self.times.back().unwrap(), self.states.back().unwrap())
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, &Vector)> + '_ {
        self.times.iter().copied().zip(self.states.iter())
    }

    fn coverage_error(&self, t: f64) -> Error {
        let (start, end) = self.coverage();
        Error::Coverage { t, start, end }
    }

    /// Linear interpolation; exact at stored sample times.
    pub fn value_at(&self, t: f64) -> Result<Vector> {
        let (start, end) = self.coverage();
        if !(t >= start && t <= end) {
            return Err(self.coverage_error(t));
        }
        let i = self.times.partition_point(|s| *s < t);
        if self.times[i] == t {
            return Ok(self.states[i].clone());
        }
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let theta = (t - t0) / (t1 - t0);
        let x0 = &self.states[i - 1];
        let x1 = &self.states[i];
        Ok(x0 + (x1 - x0) * theta)
    }

    /// `sup |x|` over `[t0, t1]` of the interpolant.
    pub fn sup_norm(&self, t0: f64, t1: f64) -> Result<f64> {
        let mut sup = self.value_at(t0)?.norm().max(self.value_at(t1)?.norm());
        let lo = self.times.partition_point(|s| *s <= t0);
        let hi = self.times.partition_point(|s| *s < t1);
        for i in lo..hi {
            sup = sup.max(self.states[i].norm());
        }
        Ok(sup)
    }

    /// Drops samples that are not needed to evaluate the history on
    /// `[t, end]`: everything before the last sample at or before `t`.
    pub fn prune_before(&mut self, t: f64) {
        while self.times.len() > 1 && self.times[1] <= t {
            self.times.pop_front();
            self.states.pop_front();
        }
    }
}
