//! Indexed eigenvalues and normalized eigenfunctions by shooting.
//!
//! The `n`-th eigenvalue is the root of the miss distance
//! `D(λ) = θ(b; λ) − γ(λ) − (n − 1)π`, where `θ` starts on the left boundary
//! ray and `γ ∈ (0, π]` is the target angle of the right boundary condition.
//! `D` increases with `λ`, and its sign does not depend on the scale used to
//! measure the angle, so one fixed scale is used per root solve.
//!
//! Problems with general `p` are solved in Liouville normal form and the
//! eigenfunction is mapped back to the original variable.

mod brent;
mod normalized;

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coefficients::{liouville_transform, LiouvilleMap, PiecewiseFn, SLProblem};
use crate::error::{require_positive, Error, Result};
use crate::prufer::transfer::{pieces_of, shoot, Piece, ShotOptions};
use crate::prufer::{
    boundary_data, initial_angle_scaled, integrate_angle_system, interior_zeros,
    target_angle_scaled, DEFAULT_RK_TOL,
};
pub(crate) use normalized::NormalizedShot;

/// Default relative tolerance on eigenvalues.
pub const DEFAULT_TOL: f64 = 1e-9;
const MAX_EXPANSIONS: usize = 400;
const MAX_BRENT: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Exact transfer matrices on each constant piece.
    #[default]
    Transfer,
    /// Adaptive Runge–Kutta integration of the Prüfer angle equation.
    Prufer,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Eigenvalues are located to `tol · max(1, |λ|)`.
    pub tol: f64,
    pub backend: Backend,
    /// Per-unit-length tolerance of the Runge–Kutta backend.
    pub rk_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            backend: Backend::Transfer,
            rk_tol: DEFAULT_RK_TOL,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Default::default()
        }
    }
}

/// A normalized eigenpair. `phi_prime` holds the quasi-derivative `p φ'`,
/// which is the ordinary derivative for normal-form problems.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Eigenpair {
    pub index: usize,
    pub lambda_n: f64,
    pub xs: Vec<f64>,
    pub phi: Vec<f64>,
    pub phi_prime: Vec<f64>,
    /// `(∫ ω y²)^{-1/2}` for the solution with `(y, p y')(a) = (sin α, −cos α)`
    /// (or `(0, 1)` when `α = 0`).
    pub normalization_beta: f64,
    pub sup_norm: f64,
    pub oscillations: usize,
}

/// Shared, immutable per-problem context. Safe to use from many threads.
#[derive(Debug, Clone)]
pub struct Solver {
    original: SLProblem,
    normal: SLProblem,
    map: Option<LiouvilleMap>,
    pieces: Vec<Piece>,
    opts: SolverOptions,
    floor: f64,
}

impl Solver {
    pub fn new(prob: &SLProblem, opts: SolverOptions) -> Result<Self> {
        require_positive("tol", opts.tol)?;
        if opts.backend == Backend::Prufer {
            require_positive("rk_tol", opts.rk_tol)?;
        }
        let (normal, map) = if prob.is_normal_form() {
            (prob.clone(), None)
        } else {
            (
                liouville_transform(prob)?,
                Some(LiouvilleMap::new(prob.p())),
            )
        };
        let pieces = pieces_of(&normal, &[]);
        let floor = find_floor(&pieces, normal.alpha(), normal.beta())?;
        Ok(Self {
            original: prob.clone(),
            normal,
            map,
            pieces,
            opts,
            floor,
        })
    }

    pub fn problem(&self) -> &SLProblem {
        &self.original
    }

    /// The normal-form problem actually shot on.
    pub fn normal_form(&self) -> &SLProblem {
        &self.normal
    }

    pub fn options(&self) -> &SolverOptions {
        &self.opts
    }

    /// A value strictly below the lowest eigenvalue.
    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn miss_distance(&self, n: usize, lambda: f64) -> Result<f64> {
        check_index(n)?;
        let kappa = if lambda > 0.0 { lambda.sqrt() } else { 1.0 };
        Ok(transfer_miss(&self.pieces, &self.normal, n, lambda, kappa))
    }

    pub fn eigenvalue(&self, n: usize) -> Result<f64> {
        check_index(n)?;
        let lo = self.floor;
        let hi = self.ceiling(n, lo)?;
        let kappa = hi.max(1.0).sqrt();
        let tol = self.opts.tol;
        let xtol = |x: f64| tol * x.abs().max(1.0);
        let lambda = match self.opts.backend {
            Backend::Transfer => {
                let d = |l: f64| transfer_miss(&self.pieces, &self.normal, n, l, kappa);
                let (flo, fhi) = (d(lo), d(hi));
                check_sign_change(n, lo, hi, flo, fhi)?;
                brent::brent(d, lo, hi, flo, fhi, xtol, MAX_BRENT).0
            }
            Backend::Prufer => {
                let shift = (1.0 - lo).max(0.0);
                let q = self.normal.q().add(&self.normal.omega().scale(shift))?;
                let d = |l: f64| self.prufer_miss(&q, n, l + shift);
                let (flo, fhi) = (d(lo)?, d(hi)?);
                check_sign_change(n, lo, hi, flo, fhi)?;
                let mut failure = None;
                let f = |l: f64| match d(l) {
                    Ok(v) => v,
                    Err(e) => {
                        failure.get_or_insert(e);
                        0.0
                    }
                };
                let root = brent::brent(f, lo, hi, flo, fhi, xtol, MAX_BRENT).0;
                if let Some(e) = failure {
                    return Err(e);
                }
                root
            }
        };
        // Near a boundary layer θ(b) can sweep through almost π inside the
        // final bracket, so either side of the root may carry the count.
        let found = self.oscillations_at(lambda);
        let step = xtol(lambda);
        let near = [lambda - step, lambda + step]
            .iter()
            .any(|&l| self.oscillations_at(l) == n - 1);
        if found != n - 1 && !near {
            return Err(Error::OscillationMismatch {
                n,
                lambda,
                expected: n - 1,
                found,
            });
        }
        Ok(lambda)
    }

    pub fn eigenpair(&self, n: usize) -> Result<Eigenpair> {
        let lambda = self.eigenvalue(n)?;
        let ns = self.normalized(lambda, &[]);
        let (mut xs, phi, phi_prime) = ns.samples();
        if let Some(map) = &self.map {
            for x in xs.iter_mut() {
                *x = map.inverse(*x);
            }
            xs[0] = self.original.a();
            *xs.last_mut().unwrap() = self.original.b();
        }
        Ok(Eigenpair {
            index: n,
            lambda_n: lambda,
            xs,
            phi,
            phi_prime,
            normalization_beta: ns.beta(),
            sup_norm: ns.sup_norm(),
            oscillations: ns.oscillations(),
        })
    }

    /// The first `count` eigenvalues, computed in parallel and checked to be
    /// strictly increasing.
    pub fn eigenvalues_up_to(&self, count: usize) -> Result<Vec<f64>> {
        check_index(count)?;
        let out = (1..=count)
            .into_par_iter()
            .map(|n| self.eigenvalue(n))
            .collect::<Result<Vec<_>>>()?;
        check_increasing(&out)?;
        Ok(out)
    }

    pub fn eigenpairs_up_to(&self, count: usize) -> Result<Vec<Eigenpair>> {
        check_index(count)?;
        let out = (1..=count)
            .into_par_iter()
            .map(|n| self.eigenpair(n))
            .collect::<Result<Vec<_>>>()?;
        check_increasing(&out.iter().map(|e| e.lambda_n).collect::<Vec<_>>())?;
        Ok(out)
    }

    /// `∫ φ² h dx` for the normalized eigenfunction at the eigenvalue `lambda`,
    /// integrated in closed form on every sub-step.
    pub fn square_moment(&self, lambda: f64, h: &PiecewiseFn) -> Result<f64> {
        self.original.p().check_same_interval(h)?;
        let h = match &self.map {
            Some(map) => map.transport(self.original.p(), h)?,
            None => h.clone(),
        };
        let ns = self.normalized(lambda, h.breakpoints());
        Ok(ns.unweighted_integral(|mid| h.eval(mid)))
    }

    pub(crate) fn normalized(&self, lambda: f64, extra: &[f64]) -> NormalizedShot {
        let pieces = if extra.is_empty() {
            self.pieces.clone()
        } else {
            pieces_of(&self.normal, extra)
        };
        NormalizedShot::new(pieces, lambda, self.normal.alpha(), self.normal.beta())
    }

    fn oscillations_at(&self, lambda: f64) -> usize {
        let kappa = if lambda > 0.0 { lambda.sqrt() } else { 1.0 };
        let shot = shoot(
            &self.pieces,
            lambda,
            kappa,
            boundary_data(self.normal.alpha()),
            ShotOptions::default(),
        );
        interior_zeros(
            initial_angle_scaled(self.normal.alpha(), kappa),
            shot.theta_end(),
        )
    }

    fn prufer_miss(&self, q_shifted: &PiecewiseFn, n: usize, lambda: f64) -> Result<f64> {
        let s = lambda.sqrt();
        let theta0 = initial_angle_scaled(self.normal.alpha(), s);
        let run = integrate_angle_system(
            q_shifted,
            self.normal.omega(),
            None,
            lambda,
            theta0,
            0.0,
            self.opts.rk_tol,
            &[],
        )?;
        let theta = run.states.last().unwrap()[0];
        Ok(theta - target_angle_scaled(self.normal.beta(), s) - (n - 1) as f64 * PI)
    }

    /// A value above `λ_n`, starting from a Weyl-type guess.
    fn ceiling(&self, n: usize, lo: f64) -> Result<f64> {
        let root_mass: f64 = self
            .pieces
            .iter()
            .map(|p| p.omega.sqrt() * (p.right - p.left))
            .sum();
        let shift = self
            .pieces
            .iter()
            .map(|p| p.q / p.omega)
            .fold(0.0f64, f64::max);
        let weyl = (n as f64 * PI / root_mass).powi(2) + shift;
        let mut hi = (weyl + 1.0).max(lo + 1.0);
        for _ in 0..MAX_EXPANSIONS {
            let kappa = hi.max(1.0).sqrt();
            if transfer_miss(&self.pieces, &self.normal, n, hi, kappa) > 0.0 {
                return Ok(hi);
            }
            hi = lo + 2.0 * (hi - lo);
            if !hi.is_finite() {
                break;
            }
        }
        Err(Error::Bracket {
            n,
            detail: format!("no upper bracket found above {lo}"),
        })
    }
}

fn check_index(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::BadIndex(n))
    } else {
        Ok(())
    }
}

fn check_sign_change(n: usize, lo: f64, hi: f64, flo: f64, fhi: f64) -> Result<()> {
    if flo < 0.0 && fhi > 0.0 {
        Ok(())
    } else {
        Err(Error::Bracket {
            n,
            detail: format!("no sign change on [{lo}, {hi}]: D = ({flo}, {fhi})"),
        })
    }
}

fn check_increasing(values: &[f64]) -> Result<()> {
    match values.windows(2).position(|w| w[1] <= w[0]) {
        None => Ok(()),
        Some(i) => Err(Error::Degenerate(format!(
            "eigenvalues {} and {} are not strictly increasing: {} >= {}",
            i + 1,
            i + 2,
            values[i],
            values[i + 1]
        ))),
    }
}

fn transfer_miss(pieces: &[Piece], prob: &SLProblem, n: usize, lambda: f64, kappa: f64) -> f64 {
    let shot = shoot(
        pieces,
        lambda,
        kappa,
        boundary_data(prob.alpha()),
        ShotOptions::default(),
    );
    shot.theta_end() - target_angle_scaled(prob.beta(), kappa) - (n - 1) as f64 * PI
}

/// Walk down until `λ` is below the lowest eigenvalue.
fn find_floor(pieces: &[Piece], alpha: f64, beta: f64) -> Result<f64> {
    let mut lo = pieces
        .iter()
        .map(|p| p.q / p.omega)
        .fold(f64::INFINITY, f64::min)
        - 1.0;
    let mut step = 1.0 + lo.abs();
    let init = boundary_data(alpha);
    for _ in 0..MAX_EXPANSIONS {
        let shot = shoot(pieces, lo, 1.0, init, ShotOptions::default());
        if shot.theta_end() < target_angle_scaled(beta, 1.0) {
            return Ok(lo);
        }
        lo -= step;
        step *= 2.0;
        if !lo.is_finite() {
            break;
        }
    }
    Err(Error::Bracket {
        n: 1,
        detail: "no lower bracket found".into(),
    })
}

/// `D(λ) = θ(b; λ) − γ(λ) − (n − 1)π` with the angle scaled by `√λ`
/// (by 1 when `λ ≤ 0`).
pub fn miss_distance(prob: &SLProblem, n: usize, lambda: f64) -> Result<f64> {
    check_index(n)?;
    let normal = if prob.is_normal_form() {
        prob.clone()
    } else {
        liouville_transform(prob)?
    };
    let pieces = pieces_of(&normal, &[]);
    let kappa = if lambda > 0.0 { lambda.sqrt() } else { 1.0 };
    Ok(transfer_miss(&pieces, &normal, n, lambda, kappa))
}

pub fn eigenvalue(prob: &SLProblem, n: usize, tol: f64) -> Result<f64> {
    Solver::new(prob, SolverOptions::with_tol(tol))?.eigenvalue(n)
}

pub fn eigenfunction(prob: &SLProblem, n: usize, tol: f64) -> Result<Eigenpair> {
    Solver::new(prob, SolverOptions::with_tol(tol))?.eigenpair(n)
}

pub fn eigenvalues_up_to(prob: &SLProblem, count: usize, tol: f64) -> Result<Vec<f64>> {
    Solver::new(prob, SolverOptions::with_tol(tol))?.eigenvalues_up_to(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(v: f64) -> PiecewiseFn {
        PiecewiseFn::constant(0.0, 1.0, v).unwrap()
    }

    #[test]
    fn miss_distance_examples() {
        let prob = SLProblem::dirichlet(unit(0.0), unit(1.0)).unwrap();
        assert!(miss_distance(&prob, 1, PI * PI).unwrap().abs() < 1e-12);
        assert!((miss_distance(&prob, 1, 4.0 * PI * PI).unwrap() - PI).abs() < 1e-12);
        assert!(miss_distance(&prob, 0, 1.0).is_err());
    }

    #[test]
    fn dirichlet_spectrum() {
        let prob = SLProblem::dirichlet(unit(0.0), unit(1.0)).unwrap();
        let ev = eigenvalues_up_to(&prob, 50, 1e-10).unwrap();
        for (i, l) in ev.iter().enumerate() {
            let exact = ((i + 1) as f64 * PI).powi(2);
            assert!((l - exact).abs() <= 1e-9 * exact, "n={} {l} {exact}", i + 1);
        }
    }

    #[test]
    fn neumann_spectrum_starts_at_zero() {
        let prob = SLProblem::normal(unit(0.0), unit(1.0), PI / 2.0, PI / 2.0).unwrap();
        let ev = eigenvalues_up_to(&prob, 3, 1e-10).unwrap();
        assert!(ev[0].abs() < 1e-9);
        assert!((ev[1] - PI * PI).abs() < 1e-8);
        assert!((ev[2] - 4.0 * PI * PI).abs() < 1e-8);
    }

    #[test]
    fn negative_eigenvalue_from_deep_well() {
        // -y'' - 100 y = λ y, Dirichlet: λ₁ = π² − 100
        let prob = SLProblem::dirichlet(unit(-100.0), unit(1.0)).unwrap();
        let l = eigenvalue(&prob, 1, 1e-12).unwrap();
        assert!((l - (PI * PI - 100.0)).abs() < 1e-9);
        let opts = SolverOptions {
            backend: Backend::Prufer,
            tol: 1e-11,
            ..Default::default()
        };
        let l2 = Solver::new(&prob, opts).unwrap().eigenvalue(1).unwrap();
        assert!((l2 - l).abs() < 1e-7, "{l2} vs {l}");
    }

    #[test]
    fn eigenfunction_is_normalized_sine() {
        let prob = SLProblem::dirichlet(unit(0.0), unit(1.0)).unwrap();
        for n in [1, 4, 17] {
            let e = eigenfunction(&prob, n, 1e-11).unwrap();
            assert!((e.sup_norm - 2f64.sqrt()).abs() < 1e-9);
            assert_eq!(e.oscillations, n - 1);
            let s = (n as f64) * PI;
            for (x, p) in e.xs.iter().zip(&e.phi) {
                assert!((p - 2f64.sqrt() * (s * x).sin()).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn general_p_is_mapped_back() {
        // p ≡ 4: eigenvalues 4 n² π², eigenfunctions √2 sin(nπx), p φ' = 4 √2 nπ cos(nπx)
        let prob = SLProblem::new(unit(4.0), unit(0.0), unit(1.0), 0.0, 0.0).unwrap();
        let e = eigenfunction(&prob, 2, 1e-11).unwrap();
        assert!((e.lambda_n - 16.0 * PI * PI).abs() < 1e-8);
        assert_eq!(e.xs[0], 0.0);
        assert_eq!(*e.xs.last().unwrap(), 1.0);
        for i in 0..e.xs.len() {
            let x = e.xs[i];
            assert!((e.phi[i] - 2f64.sqrt() * (2.0 * PI * x).sin()).abs() < 1e-8);
            let dp = 4.0 * 2f64.sqrt() * 2.0 * PI * (2.0 * PI * x).cos();
            assert!((e.phi_prime[i] - dp).abs() < 1e-7);
        }
    }
}
