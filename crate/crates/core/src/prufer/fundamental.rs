use std::f64::consts::FRAC_PI_2;

use super::transfer::{shoot, Piece, ShotOptions};
use crate::coefficients::PiecewiseFn;
use crate::error::{require_positive, Result};

/// Phase step used when sampling the fundamental pair.
const SAMPLE_PHASE: f64 = std::f64::consts::PI / 16.0;

/// Solutions of `-y'' = λ ω y` with `(φ, φ')(a) = (0, 1)` and
/// `(ψ, ψ')(a) = (1, 0)`, in polar form
/// `φ = r sin ν / √λ`, `φ' = r cos ν`, `ψ = μ sin σ`, `ψ' = √λ μ cos σ`.
#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalPair {
    pub lambda: f64,
    pub xs: Vec<f64>,
    pub phi: Vec<f64>,
    pub phi_prime: Vec<f64>,
    pub psi: Vec<f64>,
    pub psi_prime: Vec<f64>,
    pub r: Vec<f64>,
    pub nu: Vec<f64>,
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
}

impl FundamentalPair {
    /// `ψ φ' − ψ' φ` at every sample.
    pub fn wronskian(&self) -> Vec<f64> {
        (0..self.xs.len())
            .map(|i| self.psi[i] * self.phi_prime[i] - self.psi_prime[i] * self.phi[i])
            .collect()
    }
}

pub fn fundamental_pair(omega: &PiecewiseFn, lambda: f64) -> Result<FundamentalPair> {
    require_positive("lambda", lambda)?;
    let s = lambda.sqrt();
    let pieces: Vec<Piece> = omega
        .pieces()
        .map(|(left, right, w)| Piece {
            left,
            right,
            q: 0.0,
            omega: w,
        })
        .collect();
    let opts = ShotOptions {
        max_phase: SAMPLE_PHASE,
        min_sub: 4,
        record: true,
    };
    let phi = shoot(&pieces, lambda, s, (0.0, 1.0), opts);
    let psi = shoot(&pieces, lambda, s, (1.0, 0.0), opts);
    let n = phi.nodes.len();
    let mut out = FundamentalPair {
        lambda,
        xs: Vec::with_capacity(n),
        phi: Vec::with_capacity(n),
        phi_prime: Vec::with_capacity(n),
        psi: Vec::with_capacity(n),
        psi_prime: Vec::with_capacity(n),
        r: Vec::with_capacity(n),
        nu: Vec::with_capacity(n),
        mu: Vec::with_capacity(n),
        sigma: Vec::with_capacity(n),
    };
    for (a, b) in phi.nodes.iter().zip(&psi.nodes) {
        let (ea, eb) = (a.log_scale.exp(), b.log_scale.exp());
        out.xs.push(a.x);
        out.phi.push(a.y * ea);
        out.phi_prime.push(a.yp * ea);
        out.psi.push(b.y * eb);
        out.psi_prime.push(b.yp * eb);
        out.r.push(ea * (lambda * a.y * a.y + a.yp * a.yp).sqrt());
        out.nu.push(a.theta);
        out.mu.push(eb * (b.y * b.y + b.yp * b.yp / lambda).sqrt());
        out.sigma.push(b.theta);
    }
    debug_assert!((out.sigma[0] - FRAC_PI_2).abs() < 1e-15);
    Ok(out)
}
