use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::coefficients::{PiecewiseFn, SLProblem};
use crate::eigensolver::{Eigenpair, Solver, SolverOptions};
use crate::error::{require_positive, Error, Result};
use crate::prufer::transfer::{pieces_of, shoot, Shot, ShotOptions};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupnormSweep {
    /// Largest eigenfunction sup-norm seen.
    pub m_hat: f64,
    /// `per_n[n − 1]` is the largest sup-norm of `φₙ` over all potentials.
    pub per_n: Vec<f64>,
}

impl SupnormSweep {
    fn from_pairs(pairs: &[Vec<Eigenpair>], count: usize) -> Self {
        let mut per_n = vec![0.0f64; count];
        for list in pairs {
            for e in list {
                per_n[e.index - 1] = per_n[e.index - 1].max(e.sup_norm);
            }
        }
        let m_hat = per_n.iter().copied().fold(0.0, f64::max);
        Self { m_hat, per_n }
    }
}

/// Eigenpairs `1..=count` for every potential, computed in parallel.
pub(crate) fn sweep_eigenpairs(
    template: &SLProblem,
    potentials: &[PiecewiseFn],
    count: usize,
    opts: &SolverOptions,
) -> Result<Vec<Vec<Eigenpair>>> {
    potentials
        .par_iter()
        .map(|q| Solver::new(&template.with_potential(q.clone())?, *opts)?.eigenpairs_up_to(count))
        .collect()
}

/// `M̂ = max sup_x |φₙ|` over the given potentials and `n ≤ count`.
pub fn supnorm_sweep(
    template: &SLProblem,
    potentials: &[PiecewiseFn],
    count: usize,
) -> Result<SupnormSweep> {
    supnorm_sweep_with(template, potentials, count, &SolverOptions::default())
}

pub fn supnorm_sweep_with(
    template: &SLProblem,
    potentials: &[PiecewiseFn],
    count: usize,
    opts: &SolverOptions,
) -> Result<SupnormSweep> {
    if potentials.is_empty() {
        return Err(Error::Degenerate("no potentials to sweep".into()));
    }
    let pairs = sweep_eigenpairs(template, potentials, count, opts)?;
    Ok(SupnormSweep::from_pairs(&pairs, count))
}

pub(crate) fn sweep_from_pairs(pairs: &[Vec<Eigenpair>], count: usize) -> SupnormSweep {
    SupnormSweep::from_pairs(pairs, count)
}

const VOC_PHASE: f64 = PI / 16.0;

fn shot_for(q: &PiecewiseFn, omega: &PiecewiseFn, lambda: f64, init: (f64, f64)) -> Result<Shot> {
    let prob = SLProblem::normal(q.clone(), omega.clone(), 0.0, 0.0)?;
    let pieces = pieces_of(&prob, &[]);
    Ok(shoot(
        &pieces,
        lambda,
        lambda.sqrt(),
        init,
        ShotOptions {
            max_phase: VOC_PHASE,
            min_sub: 4,
            record: true,
        },
    ))
}

/// `sup_x |y(x; λ) − C₁ ψ(x; λ)|`, where `y` solves `-y'' + q y = λ ω y` with
/// `(y, y')(a) = (C₁, C₂)` and `ψ` is the `q ≡ 0` solution with
/// `(ψ, ψ')(a) = (1, 0)`.
pub fn voc_residual(
    omega: &PiecewiseFn,
    q: &PiecewiseFn,
    c1: f64,
    c2: f64,
    lambda: f64,
) -> Result<f64> {
    require_positive("lambda", lambda)?;
    if c1 == 0.0 && c2 == 0.0 {
        return Err(Error::Degenerate("(C1, C2) must not both vanish".into()));
    }
    omega.check_same_interval(q)?;
    let zero = PiecewiseFn::constant(omega.start(), omega.end(), 0.0)?;
    let y = shot_for(q, omega, lambda, (c1, c2))?;
    let psi = shot_for(&zero, omega, lambda, (1.0, 0.0))?;
    let diff = |x: f64| (y.eval(x).0 - c1 * psi.eval(x).0).abs();

    let mut xs: Vec<f64> = y.nodes.iter().chain(&psi.nodes).map(|n| n.x).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let vals: Vec<f64> = xs.iter().map(|&x| diff(x)).collect();
    let mut best = vals.iter().copied().fold(0.0, f64::max);
    for i in 1..xs.len().saturating_sub(1) {
        if vals[i] >= vals[i - 1] && vals[i] >= vals[i + 1] {
            best = best.max(golden_max(&diff, xs[i - 1], xs[i + 1]));
        }
    }
    Ok(best)
}

/// Maximum of a unimodal function on `[a, b]` by golden-section search.
fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    const R: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - R * (b - a);
    let mut x2 = a + R * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..60 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + R * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - R * (b - a);
            f1 = f(x1);
        }
        if b - a < 1e-15 * (1.0 + a.abs()) {
            break;
        }
    }
    f1.max(f2)
}
