use std::f64::consts::PI;

use serde::Serialize;

use super::{Component, LAB_TOL};
use crate::coefficients::{hypothesis_report, Monotonicity, PiecewiseFn};
use crate::error::{require_positive, Error, Result};
use crate::prufer::integrate_angle_system;
use crate::quadrature::adaptive_simpson;

const H_SAMPLES: usize = 512;
const SIMPSON_TOL: f64 = 1e-12;

fn check_points(omega: &PiecewiseFn, cs: &[f64]) -> Result<()> {
    for &c in cs {
        if !(c >= omega.start() && c <= omega.end()) {
            return Err(Error::InvalidProblem(format!(
                "c = {c} lies outside [{}, {}]",
                omega.start(),
                omega.end()
            )));
        }
    }
    Ok(())
}

fn nearest(xs: &[f64], c: f64) -> usize {
    let i = xs.partition_point(|&x| x < c).min(xs.len() - 1);
    if i > 0 && (c - xs[i - 1]).abs() < (xs[i] - c).abs() {
        i - 1
    } else {
        i
    }
}

/// `(∫₀^c g sin 2θ, ∫₀^c g cos 2θ)` at every `c` in `cs`, with `θ` the
/// `q ≡ 0` Prüfer angle started at `theta0`.
pub fn oscillatory_profile(
    omega: &PiecewiseFn,
    g: &PiecewiseFn,
    lambda: f64,
    theta0: f64,
    cs: &[f64],
) -> Result<Vec<(f64, f64)>> {
    require_positive("lambda", lambda)?;
    omega.check_same_interval(g)?;
    check_points(omega, cs)?;
    let zero = PiecewiseFn::constant(omega.start(), omega.end(), 0.0)?;
    let run = integrate_angle_system(&zero, omega, Some(g), lambda, theta0, 0.0, LAB_TOL, cs)?;
    Ok(cs
        .iter()
        .map(|&c| {
            let st = run.states[nearest(&run.xs, c)];
            (st[2], st[3])
        })
        .collect())
}

pub fn oscillatory_integrals(
    omega: &PiecewiseFn,
    g: &PiecewiseFn,
    lambda: f64,
    c: f64,
    theta0: f64,
) -> Result<(f64, f64)> {
    Ok(oscillatory_profile(omega, g, lambda, theta0, &[c])?[0])
}

/// The entry of largest magnitude among `∫₀^c g sin 2θ` (or `cos`) over all
/// `c ∈ cs` and starting angles `θ₀ ∈ theta0s`.
pub fn oscillatory_sup(
    omega: &PiecewiseFn,
    g: &PiecewiseFn,
    lambda: f64,
    theta0s: &[f64],
    cs: &[f64],
    component: Component,
) -> Result<f64> {
    let mut best = 0.0f64;
    for &t0 in theta0s {
        for (s, c) in oscillatory_profile(omega, g, lambda, t0, cs)? {
            let v = match component {
                Component::Sine => s,
                Component::Cosine => c,
            };
            if v.abs() > best.abs() {
                best = v;
            }
        }
    }
    Ok(best)
}

/// Ceilings for `G(c; λ) = (√λ/2) ∫₀^c g sin 2θ` and its cosine analogue
/// `G̃`, built from `g(0)` and `ω(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct G0Bound {
    /// `f(0) = ∫₀^{π/2} g(0) sin 2u / (cos²u + ω(0) sin²u) du`.
    pub f0: f64,
    /// `f̃(0) = ∫_{π/4}^{3π/4} g(0) cos 2u / (cos²u + ω(0) sin²u) du`.
    pub f0_tilde: f64,
    /// `G₀/2 = (f(0) + π g(0) / min{ω(0), 1}) / 2`.
    pub g0_half: f64,
    /// `(|f(0)| + (5π/4) g(0) / min{ω(0), 1}) / 2`.
    pub cosine_bound: f64,
    /// The same ceiling with `|f̃(0)|` in place of `|f(0)|`.
    pub cosine_bound_tilde: f64,
}

/// Requires `g` non-increasing and non-negative and `ω` non-decreasing and
/// positive. A non-increasing weight is rejected; reflect both functions with
/// [`PiecewiseFn::reflect`] first, keeping in mind that this turns `g` into an
/// increasing function.
pub fn g0_bound(g: &PiecewiseFn, omega: &PiecewiseFn) -> Result<G0Bound> {
    omega.check_same_interval(g)?;
    if g.values().windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::Hypothesis("g must be non-increasing".into()));
    }
    if g.min_value() < 0.0 {
        return Err(Error::Hypothesis("g must be non-negative".into()));
    }
    let rep = hypothesis_report(omega);
    if rep.h1_monotone != Monotonicity::Increasing {
        return Err(Error::Hypothesis(format!(
            "the weight must be non-decreasing (found {:?})",
            rep.h1_monotone
        )));
    }
    if rep.h2_essential_inf <= 0.0 {
        return Err(Error::Hypothesis("the weight must be positive".into()));
    }
    let g0 = g.values()[0];
    let w0 = omega.values()[0];
    let denom = |u: f64| {
        let (s, c) = u.sin_cos();
        c * c + w0 * s * s
    };
    let f0 = adaptive_simpson(
        |u| g0 * (2.0 * u).sin() / denom(u),
        0.0,
        PI / 2.0,
        SIMPSON_TOL,
    );
    let f0_tilde = adaptive_simpson(
        |u| g0 * (2.0 * u).cos() / denom(u),
        PI / 4.0,
        3.0 * PI / 4.0,
        SIMPSON_TOL,
    );
    let tail = g0 / w0.min(1.0);
    Ok(G0Bound {
        f0,
        f0_tilde,
        g0_half: 0.5 * (f0 + PI * tail),
        cosine_bound: 0.5 * (f0.abs() + 1.25 * PI * tail),
        cosine_bound_tilde: 0.5 * (f0_tilde.abs() + 1.25 * PI * tail),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HField {
    pub lambda: f64,
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
    /// `sup_x |H(x; λ)|` over the samples.
    pub sup: f64,
}

/// `H(x; λ) = (√λ/2) ∫₀^x (1 − ω) sin 2θ` on the breakpoints plus 512
/// uniform samples.
pub fn h_field(omega: &PiecewiseFn, lambda: f64, theta0: f64) -> Result<HField> {
    require_positive("lambda", lambda)?;
    let h = omega.map(|w| 1.0 - w)?;
    let zero = PiecewiseFn::constant(omega.start(), omega.end(), 0.0)?;
    let (a, b) = (omega.start(), omega.end());
    let samples: Vec<f64> = (1..H_SAMPLES)
        .map(|i| a + (b - a) * i as f64 / H_SAMPLES as f64)
        .collect();
    let run = integrate_angle_system(
        &zero,
        omega,
        Some(&h),
        lambda,
        theta0,
        0.0,
        LAB_TOL,
        &samples,
    )?;
    let half = 0.5 * lambda.sqrt();
    let values: Vec<f64> = run.states.iter().map(|s| half * s[2]).collect();
    let sup = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(HField {
        lambda,
        xs: run.xs,
        values,
        sup,
    })
}
