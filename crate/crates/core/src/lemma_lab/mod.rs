//! Numerical experiments on the estimates behind uniform eigenvalue bounds.
//!
//! With `q ≡ 0` the scaled Prüfer angle obeys `θ' = √λ (cos²θ + ω sin²θ)`.
//! The quantities studied here are the oscillatory integrals
//! `∫₀^c g sin 2θ` and `∫₀^c g cos 2θ`, the field
//! `H(x; λ) = (√λ/2) ∫₀^x (1 − ω) sin 2θ` (so that `ρ = ρ(0) e^H`),
//! eigenfunction sup-norms across indices and potentials, and the
//! variation-of-constants residual `y − C₁ ψ`.
//!
//! Claims of the form "bounded for all large λ" are checked on geometric
//! λ grids through a rank-correlation trend statistic.

mod asymptotics;
mod oscillatory;

pub use asymptotics::{supnorm_sweep, supnorm_sweep_with, voc_residual, SupnormSweep};
pub(crate) use asymptotics::{sweep_eigenpairs, sweep_from_pairs};
pub use oscillatory::{
    g0_bound, h_field, oscillatory_integrals, oscillatory_profile, oscillatory_sup, G0Bound, HField,
};

use serde::Serialize;

use crate::error::{require_positive, Error, Result};
use crate::stats;

/// Largest Spearman correlation between a scaled series and `λ` that still
/// counts as "no upward trend".
pub const TREND_LIMIT: f64 = 0.3;

/// Tolerance of the Runge–Kutta runs behind every experiment.
pub const LAB_TOL: f64 = 1e-10;

/// Which oscillatory integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    Sine,
    Cosine,
}

/// `count` points from `lo` to `hi`, evenly spaced in `log λ`.
pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    require_positive("grid start", lo)?;
    if !(hi > lo) || count < 2 {
        return Err(Error::Degenerate(format!(
            "grid needs lo < hi and at least 2 points, got {lo}:{hi}:{count}"
        )));
    }
    let (a, b) = (lo.ln(), hi.ln());
    let mut out: Vec<f64> = (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect();
    out[0] = lo;
    out[count - 1] = hi;
    Ok(out)
}

/// The default experiment grid `{10², 10^2.5, …, 10⁶}`.
pub fn default_grid() -> Vec<f64> {
    (0..9).map(|i| 10f64.powf(2.0 + 0.5 * i as f64)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecaySeries {
    pub lambdas: Vec<f64>,
    pub raw_values: Vec<f64>,
    /// `√λ · |raw|`.
    pub scaled_values: Vec<f64>,
    /// Slope of `log |raw|` against `log λ`, when defined.
    pub fitted_slope: Option<f64>,
}

impl DecaySeries {
    pub fn new(lambdas: Vec<f64>, raw_values: Vec<f64>) -> Result<Self> {
        if lambdas.len() != raw_values.len() {
            return Err(Error::Degenerate(format!(
                "{} grid points but {} values",
                lambdas.len(),
                raw_values.len()
            )));
        }
        if lambdas.iter().any(|&l| !(l > 0.0)) || lambdas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Degenerate(
                "lambdas must be positive and strictly increasing".into(),
            ));
        }
        let scaled_values = lambdas
            .iter()
            .zip(&raw_values)
            .map(|(l, r)| l.sqrt() * r.abs())
            .collect();
        let mut out = Self {
            lambdas,
            raw_values,
            scaled_values,
            fitted_slope: None,
        };
        out.fitted_slope = log_slope(&out.lambdas, &out.raw_values);
        Ok(out)
    }

    /// Spearman correlation of the scaled values with `λ`; `None` for a
    /// constant series (which has no trend).
    pub fn trend(&self) -> Option<f64> {
        stats::spearman(&self.lambdas, &self.scaled_values)
    }

    /// No upward trend of the scaled series.
    pub fn is_flat(&self) -> bool {
        self.trend().is_none_or(|r| r <= TREND_LIMIT)
    }

    /// Ratio of the last raw magnitude to the first.
    pub fn decay_ratio(&self) -> f64 {
        self.raw_values.last().unwrap().abs() / self.raw_values[0].abs()
    }
}

fn log_slope(lambdas: &[f64], raw: &[f64]) -> Option<f64> {
    let (x, y): (Vec<f64>, Vec<f64>) = lambdas
        .iter()
        .zip(raw)
        .filter(|(_, r)| **r != 0.0)
        .map(|(l, r)| (l.ln(), r.abs().ln()))
        .unzip();
    stats::slope(&x, &y)
}

/// Least-squares slope of `log |raw|` against `log λ`. Needs at least five
/// points spanning three decades; zero entries are skipped.
pub fn decay_fit(series: &DecaySeries) -> Result<f64> {
    let l = &series.lambdas;
    if l.len() < 5 || l[l.len() - 1] / l[0] < 1e3 * (1.0 - 1e-12) {
        return Err(Error::Degenerate(
            "decay fit needs at least 5 points spanning 3 decades".into(),
        ));
    }
    if series.raw_values.iter().all(|&r| r == 0.0) {
        return Err(Error::Degenerate(
            "all values are zero; slope undefined".into(),
        ));
    }
    log_slope(l, &series.raw_values)
        .ok_or_else(|| Error::Degenerate("fewer than two nonzero values".into()))
}
