//! Piecewise-constant coefficient functions and the problem type built on them.

mod hypothesis;
mod io;
mod problem;

pub use hypothesis::{hypothesis_report, HypothesisReport, Monotonicity};
pub use io::{PiecewiseSpec, ProblemFile};
pub use problem::{liouville_transform, LiouvilleMap, SLProblem};

use crate::error::{Error, Result};

/// Breakpoints closer than this fraction of the interval length are merged
/// when two functions are put on a common grid.
pub const MERGE_FRACTION: f64 = 1e-14;

/// A real function that is constant on each of the half-open pieces
/// `[x_{i-1}, x_i)`, with the last piece closed at the right endpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseFn {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewiseFn {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidPiecewise(format!(
                "need at least two breakpoints, got {}",
                breakpoints.len()
            )));
        }
        if values.len() + 1 != breakpoints.len() {
            return Err(Error::InvalidPiecewise(format!(
                "{} breakpoints require {} values, got {}",
                breakpoints.len(),
                breakpoints.len() - 1,
                values.len()
            )));
        }
        if let Some(x) = breakpoints.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidPiecewise(format!(
                "non-finite breakpoint {x}"
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidPiecewise(format!("non-finite value {v}")));
        }
        if let Some(w) = breakpoints.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::InvalidPiecewise(format!(
                "breakpoints must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(Self {
            breakpoints,
            values,
        })
    }

    pub fn constant(a: f64, b: f64, value: f64) -> Result<Self> {
        Self::new(vec![a, b], vec![value])
    }

    /// Equal-width pieces on `[a, b]`, one per entry of `values`.
    pub fn uniform(a: f64, b: f64, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidPiecewise("no values".into()));
        }
        let m = values.len();
        let mut bps: Vec<f64> = (0..=m).map(|i| a + (b - a) * i as f64 / m as f64).collect();
        bps[m] = b;
        Self::new(bps, values)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn start(&self) -> f64 {
        self.breakpoints[0]
    }

    pub fn end(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(left, right, value)` for every piece.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(&self.values)
            .map(|(w, &v)| (w[0], w[1], v))
    }

    /// Index of the piece containing `x`; points outside the interval are clamped.
    pub fn piece_index(&self, x: f64) -> usize {
        let m = self.values.len();
        // partition_point gives the number of breakpoints <= x
        let k = self.breakpoints.partition_point(|&b| b <= x);
        k.clamp(1, m) - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.values[self.piece_index(x)]
    }

    pub fn integral(&self) -> f64 {
        self.pieces().map(|(l, r, v)| v * (r - l)).sum()
    }

    pub fn l1_norm(&self) -> f64 {
        self.pieces().map(|(l, r, v)| v.abs() * (r - l)).sum()
    }

    pub fn total_variation(&self) -> f64 {
        self.values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn same_interval(&self, other: &Self) -> bool {
        let tol = MERGE_FRACTION * (self.end() - self.start());
        (self.start() - other.start()).abs() <= tol && (self.end() - other.end()).abs() <= tol
    }

    pub(crate) fn check_same_interval(&self, other: &Self) -> Result<()> {
        if self.same_interval(other) {
            Ok(())
        } else {
            Err(Error::IntervalMismatch {
                a1: self.start(),
                b1: self.end(),
                a2: other.start(),
                b2: other.end(),
            })
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(
            self.breakpoints.clone(),
            self.values.iter().map(|&v| f(v)).collect(),
        )
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn abs(&self) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| v.abs()).collect(),
        }
    }

    /// Pointwise combination on the common refinement of both breakpoint sets.
    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_same_interval(other)?;
        let grid = merge_breakpoints(&[self.breakpoints(), other.breakpoints()]);
        let values = grid
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                f(self.eval(mid), other.eval(mid))
            })
            .collect();
        Self::new(grid, values)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    /// Same function described on a finer grid (`grid` must contain the
    /// interval endpoints).
    pub fn resample(&self, grid: &[f64]) -> Result<Self> {
        let values = grid
            .windows(2)
            .map(|w| self.eval(0.5 * (w[0] + w[1])))
            .collect();
        Self::new(grid.to_vec(), values)
    }

    /// Mirror image `x ↦ a + b - x` on the same interval.
    pub fn reflect(&self) -> Self {
        let (a, b) = (self.start(), self.end());
        let mut bps: Vec<f64> = self.breakpoints.iter().rev().map(|x| a + b - x).collect();
        bps[0] = a;
        *bps.last_mut().unwrap() = b;
        let values = self.values.iter().rev().copied().collect();
        Self {
            breakpoints: bps,
            values,
        }
    }

    /// Merge neighbouring pieces that carry identical values.
    pub fn simplify(&self) -> Self {
        let mut bps = vec![self.breakpoints[0]];
        let mut vals: Vec<f64> = Vec::new();
        for (_, r, v) in self.pieces() {
            if vals.last() == Some(&v) {
                *bps.last_mut().unwrap() = r;
            } else {
                vals.push(v);
                bps.push(r);
            }
        }
        Self {
            breakpoints: bps,
            values: vals,
        }
    }
}

/// Sorted union of several breakpoint sets over the same interval, merging
/// points closer than [`MERGE_FRACTION`] of the interval length.
pub fn merge_breakpoints(sets: &[&[f64]]) -> Vec<f64> {
    let a = sets[0][0];
    let b = *sets[0].last().unwrap();
    let tol = MERGE_FRACTION * (b - a);
    let mut all: Vec<f64> = sets.iter().flat_map(|s| s.iter().copied()).collect();
    all.sort_by(f64::total_cmp);
    let mut out = vec![a];
    for x in all {
        if x <= a + tol || x >= b - tol {
            continue;
        }
        if x - *out.last().unwrap() > tol {
            out.push(x);
        }
    }
    out.push(b);
    out
}

pub fn l1_norm(f: &PiecewiseFn) -> f64 {
    f.l1_norm()
}

/// The point `(1 - t) q1 + t q2` on the segment between two potentials.
///
/// Written in the symmetric form so that `t = 0` and `t = 1` reproduce the
/// endpoints bit for bit.
pub fn affine_combine(q1: &PiecewiseFn, q2: &PiecewiseFn, t: f64) -> Result<PiecewiseFn> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidPiecewise(format!(
            "path parameter {t} outside [0, 1]"
        )));
    }
    let s = 1.0 - t;
    q1.zip_with(q2, |a, b| s * a + t * b)
}
