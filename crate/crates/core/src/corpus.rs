//! Seeded random coefficients for sweeps, benchmarks and tests.
//!
//! Every generator draws from a caller-supplied RNG so a single seed fixes a
//! whole experiment.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coefficients::{PiecewiseFn, SLProblem};

pub type CorpusRng = ChaCha8Rng;

pub fn rng(seed: u64) -> CorpusRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `pieces + 1` breakpoints on `[a, b]`; no piece is shorter than a fifth of
/// the average width.
pub fn random_breakpoints(rng: &mut impl Rng, a: f64, b: f64, pieces: usize) -> Vec<f64> {
    let widths: Vec<f64> = (0..pieces).map(|_| rng.gen_range(0.2..1.0)).collect();
    let total: f64 = widths.iter().sum();
    let mut out = Vec::with_capacity(pieces + 1);
    let mut acc = 0.0;
    out.push(a);
    for w in &widths[..pieces - 1] {
        acc += w;
        out.push(a + (b - a) * acc / total);
    }
    out.push(b);
    out
}

pub fn random_piecewise(
    rng: &mut impl Rng,
    a: f64,
    b: f64,
    pieces: usize,
    lo: f64,
    hi: f64,
) -> PiecewiseFn {
    let bp = random_breakpoints(rng, a, b, pieces);
    let values = (0..pieces).map(|_| rng.gen_range(lo..hi)).collect();
    PiecewiseFn::new(bp, values).expect("valid random function")
}

/// A potential on `[0, 1]` with `‖q‖₁` uniform in `[0.3, 1] · radius`.
pub fn random_potential(rng: &mut impl Rng, pieces: usize, radius: f64) -> PiecewiseFn {
    let raw = random_piecewise(rng, 0.0, 1.0, pieces, -1.0, 1.0);
    let target = radius * rng.gen_range(0.3..1.0);
    let norm = raw.l1_norm();
    raw.scale(target / norm)
}

/// Monotone values in `[lo, hi)` on `[0, 1]`.
pub fn random_monotone(
    rng: &mut impl Rng,
    pieces: usize,
    lo: f64,
    hi: f64,
    increasing: bool,
) -> PiecewiseFn {
    let bp = random_breakpoints(rng, 0.0, 1.0, pieces);
    let mut values: Vec<f64> = (0..pieces).map(|_| rng.gen_range(lo..hi)).collect();
    values.sort_by(f64::total_cmp);
    if !increasing {
        values.reverse();
    }
    PiecewiseFn::new(bp, values).expect("valid random function")
}

/// A random normal-form problem on `[0, 1]`: `‖q‖₁ ≤ 10`, monotone weight in
/// `[0.5, 4)`, boundary angles anywhere in `[0, π)`.
pub fn random_problem(rng: &mut impl Rng) -> SLProblem {
    let pieces = rng.gen_range(2..8);
    let q = random_potential(rng, pieces, 10.0);
    let increasing = rng.gen_bool(0.5);
    let pieces = rng.gen_range(1..6);
    let omega = random_monotone(rng, pieces, 0.5, 4.0, increasing);
    let alpha = rng.gen_range(0.0..PI);
    let beta = rng.gen_range(0.0..PI);
    SLProblem::normal(q, omega, alpha, beta).expect("valid random problem")
}

pub fn problem_corpus(seed: u64, count: usize) -> Vec<SLProblem> {
    let mut r = rng(seed);
    (0..count).map(|_| random_problem(&mut r)).collect()
}

/// A problem with general `p ∈ [½, 4)` on a random interval.
pub fn random_general_problem(rng: &mut impl Rng) -> SLProblem {
    let a = rng.gen_range(-1.0..1.0);
    let b = a + rng.gen_range(0.5..2.0);
    let counts: [usize; 3] = std::array::from_fn(|_| rng.gen_range(1..5));
    let p = random_piecewise(rng, a, b, counts[0], 0.5, 4.0);
    let q = random_piecewise(rng, a, b, counts[1], -5.0, 5.0);
    let omega = random_piecewise(rng, a, b, counts[2], 0.5, 3.0);
    let alpha = rng.gen_range(0.0..PI);
    let beta = rng.gen_range(0.0..PI);
    SLProblem::new(p, q, omega, alpha, beta).expect("valid random problem")
}
