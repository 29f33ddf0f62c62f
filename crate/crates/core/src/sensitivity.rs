//! Eigenvalue sensitivity to the potential.
//!
//! The derivative of `λₙ` in direction `h` is `∫ φₙ² h` for the
//! `L²_ω`-normalized eigenfunction. Along the straight path
//! `q_t = (1 − t) q₁ + t q₂` this gives
//! `|λₙ(q₂) − λₙ(q₁)| ≤ ∫₀¹ ∫ φₙ²(·; t) |q₂ − q₁| dx dt ≤ M² ‖q₂ − q₁‖₁`
//! whenever every `|φₙ(·; t)| ≤ M`.

use rayon::prelude::*;
use serde::Serialize;

use crate::coefficients::{affine_combine, PiecewiseFn, SLProblem};
use crate::eigensolver::{Solver, SolverOptions};
use crate::error::{require_positive, Error, Result};
use crate::lemma_lab::{sweep_eigenpairs, sweep_from_pairs};
use crate::quadrature::{gauss_legendre, trapezoid_weights};

/// Eigenvalue tolerance used when differencing eigenvalues.
pub const FD_TOL: f64 = 1e-14;
/// Relative slack allowed in the Lipschitz certificate.
pub const LIPSCHITZ_SLACK: f64 = 0.05;
/// Path nodes at which eigenfunction sup-norms are sampled.
pub const PATH_NODES: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
/// Default number of Gauss–Legendre nodes in `t`.
pub const DEFAULT_T_NODES: usize = 5;

/// `∫ φₙ² h` for the normalized `n`-th eigenfunction.
pub fn derivative_functional(prob: &SLProblem, n: usize, h: &PiecewiseFn) -> Result<f64> {
    let solver = Solver::new(prob, SolverOptions::with_tol(FD_TOL))?;
    derivative_functional_with(&solver, n, h)
}

pub fn derivative_functional_with(solver: &Solver, n: usize, h: &PiecewiseFn) -> Result<f64> {
    let lambda = solver.eigenvalue(n)?;
    solver.square_moment(lambda, h)
}

/// Central difference `(λₙ(q + εh) − λₙ(q − εh)) / 2ε`.
pub fn fd_derivative(prob: &SLProblem, n: usize, h: &PiecewiseFn, eps: f64) -> Result<f64> {
    require_positive("eps", eps)?;
    let plus = prob.q().zip_with(h, |q, h| q + eps * h)?;
    let minus = prob.q().zip_with(h, |q, h| q - eps * h)?;
    let opts = SolverOptions::with_tol(FD_TOL);
    let lp = Solver::new(&prob.with_potential(plus)?, opts)?.eigenvalue(n)?;
    let lm = Solver::new(&prob.with_potential(minus)?, opts)?.eigenvalue(n)?;
    Ok((lp - lm) / (2.0 * eps))
}

/// `1e-4 · max(1, ‖q‖₁)`.
pub fn default_fd_step(prob: &SLProblem) -> f64 {
    1e-4 * prob.q().l1_norm().max(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LipschitzReport {
    pub n_max: usize,
    /// `ratios[n − 1] = |λₙ(q₁) − λₙ(q₂)| / ‖q₁ − q₂‖₁`.
    pub ratios: Vec<f64>,
    pub sup_ratio: f64,
    /// Largest eigenfunction sup-norm over the path nodes and `n ≤ n_max`.
    pub m_hat: f64,
    /// `m_hat²`.
    pub bound: f64,
    pub pass: bool,
    pub distance: f64,
    pub lambda_q1: Vec<f64>,
    pub lambda_q2: Vec<f64>,
    /// Per-index maximum sup-norm along the path.
    pub supnorm_per_n: Vec<f64>,
}

impl LipschitzReport {
    /// Largest ratio over the indices `lo..=hi` (1-based).
    pub fn max_ratio(&self, lo: usize, hi: usize) -> f64 {
        self.ratios[lo - 1..hi].iter().copied().fold(0.0, f64::max)
    }
}

pub fn lipschitz_ratio(
    template: &SLProblem,
    q1: &PiecewiseFn,
    q2: &PiecewiseFn,
    count: usize,
) -> Result<LipschitzReport> {
    lipschitz_ratio_with(template, q1, q2, count, &SolverOptions::default())
}

pub fn lipschitz_ratio_with(
    template: &SLProblem,
    q1: &PiecewiseFn,
    q2: &PiecewiseFn,
    count: usize,
    opts: &SolverOptions,
) -> Result<LipschitzReport> {
    let distance = q1.sub(q2)?.l1_norm();
    if distance == 0.0 {
        return Err(Error::Degenerate(
            "q1 and q2 coincide; ratio undefined".into(),
        ));
    }
    if count == 0 {
        return Err(Error::BadIndex(0));
    }
    let path = PATH_NODES
        .iter()
        .map(|&t| affine_combine(q1, q2, t))
        .collect::<Result<Vec<_>>>()?;
    let pairs = sweep_eigenpairs(template, &path, count, opts)?;
    let sweep = sweep_from_pairs(&pairs, count);
    let lambda_q1: Vec<f64> = pairs[0].iter().map(|e| e.lambda_n).collect();
    let lambda_q2: Vec<f64> = pairs[pairs.len() - 1].iter().map(|e| e.lambda_n).collect();
    let ratios: Vec<f64> = lambda_q1
        .iter()
        .zip(&lambda_q2)
        .map(|(a, b)| (a - b).abs() / distance)
        .collect();
    let sup_ratio = ratios.iter().copied().fold(0.0, f64::max);
    let bound = sweep.m_hat * sweep.m_hat;
    Ok(LipschitzReport {
        n_max: count,
        sup_ratio,
        m_hat: sweep.m_hat,
        bound,
        pass: sup_ratio <= bound * (1.0 + LIPSCHITZ_SLACK),
        distance,
        ratios,
        lambda_q1,
        lambda_q2,
        supnorm_per_n: sweep.per_n,
    })
}

/// `Σ_k w_k ∫ φₙ²(·; t_k) |q₂ − q₁|` for every `n` in `ns`.
fn path_sums(
    template: &SLProblem,
    q1: &PiecewiseFn,
    q2: &PiecewiseFn,
    ns: &[usize],
    ts: &[f64],
    ws: &[f64],
    opts: &SolverOptions,
) -> Result<Vec<f64>> {
    let dq = q2.sub(q1)?.abs();
    let per_t = ts
        .par_iter()
        .map(|&t| {
            let solver = Solver::new(&template.with_potential(affine_combine(q1, q2, t)?)?, *opts)?;
            ns.iter()
                .map(|&n| {
                    let l = solver.eigenvalue(n)?;
                    solver.square_moment(l, &dq)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((0..ns.len())
        .map(|i| per_t.iter().zip(ws).map(|(v, w)| w * v[i]).sum())
        .collect())
}

/// Trapezoid rule in `t` over `t_grid` (which must run from 0 to 1) of
/// `∫ φₙ²(·; t) |q₂ − q₁|`.
pub fn path_bound(
    template: &SLProblem,
    q1: &PiecewiseFn,
    q2: &PiecewiseFn,
    n: usize,
    t_grid: &[f64],
) -> Result<f64> {
    if t_grid.len() < 2
        || t_grid[0] != 0.0
        || *t_grid.last().unwrap() != 1.0
        || t_grid.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(Error::Degenerate(
            "t grid must increase from 0 to 1 with at least 2 nodes".into(),
        ));
    }
    let w = trapezoid_weights(t_grid);
    Ok(path_sums(
        template,
        q1,
        q2,
        &[n],
        t_grid,
        &w,
        &SolverOptions::default(),
    )?[0])
}

/// Gauss–Legendre rule with `nodes` points in `t`, for `n = 1..=count`.
pub fn path_bounds_gauss(
    template: &SLProblem,
    q1: &PiecewiseFn,
    q2: &PiecewiseFn,
    count: usize,
    nodes: usize,
    opts: &SolverOptions,
) -> Result<Vec<f64>> {
    if nodes == 0 {
        return Err(Error::Degenerate("need at least one t node".into()));
    }
    let (ts, ws) = gauss_legendre(nodes);
    let ns: Vec<usize> = (1..=count).collect();
    path_sums(template, q1, q2, &ns, &ts, &ws, opts)
}
