//! Seeded rejection samplers over sublevel bands of `V`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{AssumptionData, InputBox, Vector};

/// Rejection sampling gives up after this many draws per accepted point.
const MAX_REJECTIONS: usize = 100_000;

/// Axis extents of `{V <= level}`: for each coordinate the largest `t` with
/// `V(+t e_i) <= level` and `V(-t e_i) <= level`, found by bisection.
///
/// The box spanned by these extents covers the sublevel set when `V` grows
/// fastest along the axes, as for the Euclidean norm; other shapes may need
/// an explicit box.
pub fn sublevel_box(assm: &AssumptionData, dim: usize, level: f64) -> Result<(Vector, Vector)> {
    let mut lo = Vector::zeros(dim);
    let mut hi = Vector::zeros(dim);
    for i in 0..dim {
        for sign in [-1.0, 1.0] {
            let along = |t: f64| {
                let mut x = Vector::zeros(dim);
                x[i] = sign * t;
                assm.v(&x)
            };
            let mut outer = 1.0;
            while along(outer) <= level {
                outer *= 2.0;
                if outer > 1e12 {
                    return Err(Error::config(format!(
                        "sublevel set {{V <= {level}}} is unbounded along axis {i}"
                    )));
                }
            }
            let mut inner = 0.0;
            for _ in 0..200 {
                let mid = 0.5 * (inner + outer);
                if mid <= inner || mid >= outer {
                    break;
                }
                if along(mid) <= level {
                    inner = mid;
                } else {
                    outer = mid;
                }
            }
            if sign < 0.0 {
                lo[i] = -outer;
            } else {
                hi[i] = outer;
            }
        }
    }
    Ok((lo, hi))
}

/// Level band `lower < V <= upper` (or `lower <= V` when `closed_below`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelBand {
    pub lower: f64,
    pub upper: f64,
    pub closed_below: bool,
}

impl LevelBand {
    pub fn below(upper: f64) -> Self {
        Self {
            lower: f64::NEG_INFINITY,
            upper,
            closed_below: true,
        }
    }

    pub fn closed(lower: f64, upper: f64) -> Self {
        Self {
            lower,
            upper,
            closed_below: true,
        }
    }

    pub fn open_below(lower: f64, upper: f64) -> Self {
        Self {
            lower,
            upper,
            closed_below: false,
        }
    }

    pub fn contains(&self, level: f64) -> bool {
        let above = if self.closed_below {
            level >= self.lower
        } else {
            level > self.lower
        };
        above && level <= self.upper
    }
}

/// Uniform points of a bounding box restricted to a level band of `V`.
#[derive(Debug, Clone)]
pub struct StateSampler {
    lo: Vector,
    hi: Vector,
    band: LevelBand,
}

impl StateSampler {
    pub fn new(assm: &AssumptionData, dim: usize, band: LevelBand) -> Result<Self> {
        if !(band.upper.is_finite() && band.upper > band.lower) {
            return Err(Error::config(format!(
                "empty level band ({}, {}]",
                band.lower, band.upper
            )));
        }
        let (lo, hi) = sublevel_box(assm, dim, band.upper)?;
        Ok(Self { lo, hi, band })
    }

    pub fn draw(&self, assm: &AssumptionData, rng: &mut ChaCha8Rng) -> Result<Vector> {
        for _ in 0..MAX_REJECTIONS {
            let x = Vector::from_iterator(
                self.lo.len(),
                (0..self.lo.len()).map(|i| rng.random_range(self.lo[i]..=self.hi[i])),
            );
            if self.band.contains(assm.v(&x)) {
                return Ok(x);
            }
        }
        Err(Error::config(format!(
            "no point with V in ({}, {}] found in the bounding box",
            self.band.lower, self.band.upper
        )))
    }
}

pub fn draw_input(input_box: &InputBox, rng: &mut ChaCha8Rng) -> Vector {
    let (lo, hi) = (input_box.lower(), input_box.upper());
    Vector::from_iterator(lo.len(), (0..lo.len()).map(|i| rng.random_range(lo[i]..=hi[i])))
}

pub fn draw_box(bound: f64, dim: usize, rng: &mut ChaCha8Rng) -> Vector {
    Vector::from_iterator(dim, (0..dim).map(|_| rng.random_range(-bound..=bound)))
}
