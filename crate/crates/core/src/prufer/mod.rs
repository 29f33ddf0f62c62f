//! Scaled Prüfer variables `√λ y = ρ sin θ`, `y' = ρ cos θ` for normal-form
//! problems `-y'' + q y = λ ω y`.
//!
//! Two backends compute the same trajectory:
//! * [`propagate_transfer`] multiplies exact 2×2 transfer matrices across
//!   each constant piece and reads the angle off `(√λ y, y')`;
//! * [`integrate_prufer`] integrates the angle equation
//!   `θ' = √λ (cos²θ + ω sin²θ) − (q/√λ) sin²θ` together with
//!   `(ln ρ)' = (√λ/2)(1 − ω + q/λ) sin 2θ` by an adaptive Runge–Kutta method.

mod angle_ode;
mod fundamental;
pub(crate) mod rk;
pub(crate) mod transfer;

use std::f64::consts::PI;

pub(crate) use angle_ode::integrate_angle_system;
pub use angle_ode::{integrate_prufer, integrate_prufer_with, PruferConfig};
pub use fundamental::{fundamental_pair, FundamentalPair};
pub use transfer::propagate_transfer;

use crate::error::{require_positive, Result};

/// Default absolute tolerance, per unit length, for the Runge–Kutta backend.
pub const DEFAULT_RK_TOL: f64 = 1e-10;

/// Angles closer than this to a multiple of π at the right endpoint are
/// treated as a zero sitting on the boundary, not an interior one.
pub(crate) const ZERO_SLACK: f64 = 1e-7;

/// Sampled Prüfer path at a fixed `λ`.
///
/// `theta` and `log_rho` are only populated for `λ > 0`; `y`, `yp` and the
/// oscillation count are always available from the transfer backend.
#[derive(Debug, Clone, PartialEq)]
pub struct PruferTrajectory {
    pub lambda: f64,
    pub xs: Vec<f64>,
    pub theta: Vec<f64>,
    pub log_rho: Vec<f64>,
    pub y: Vec<f64>,
    pub yp: Vec<f64>,
    /// Zeros of `y` in the open interval.
    pub oscillation_count: usize,
}

impl PruferTrajectory {
    pub fn theta_end(&self) -> Option<f64> {
        self.theta.last().copied()
    }
}

/// Initial data `(y(a), y'(a))` satisfying the left boundary condition, scaled
/// so that the Prüfer angle starts in `[0, π)`.
pub(crate) fn boundary_data(alpha: f64) -> (f64, f64) {
    if alpha == 0.0 {
        (0.0, 1.0)
    } else {
        (alpha.sin(), -alpha.cos())
    }
}

/// Prüfer angle of `(y, y')` measured with scale `kappa`, in `(−π, π]`.
pub(crate) fn angle_of(kappa: f64, y: f64, yp: f64) -> f64 {
    (kappa * y).atan2(yp)
}

pub(crate) fn initial_angle_scaled(alpha: f64, kappa: f64) -> f64 {
    let (y, yp) = boundary_data(alpha);
    angle_of(kappa, y, yp)
}

pub(crate) fn target_angle_scaled(beta: f64, kappa: f64) -> f64 {
    if beta == 0.0 {
        PI
    } else {
        angle_of(kappa, beta.sin(), -beta.cos())
    }
}

/// The angle `θ₀ ∈ [0, π)` at which the left boundary condition
/// `y cos α + y' sin α = 0` holds.
pub fn initial_angle(alpha: f64, lambda: f64) -> Result<f64> {
    require_positive("lambda", lambda)?;
    Ok(initial_angle_scaled(alpha, lambda.sqrt()))
}

/// The angle `γ ∈ (0, π]` at which the right boundary condition
/// `y cos β + y' sin β = 0` holds.
pub fn target_angle(beta: f64, lambda: f64) -> Result<f64> {
    require_positive("lambda", lambda)?;
    Ok(target_angle_scaled(beta, lambda.sqrt()))
}

/// Number of multiples of π strictly inside `(theta_start, theta_end)`,
/// ignoring a boundary zero at the right end.
pub(crate) fn interior_zeros(theta_start: f64, theta_end: f64) -> usize {
    let lo = (theta_start / PI).floor();
    let hi = ((theta_end - ZERO_SLACK) / PI).ceil() - 1.0;
    if hi >= lo + 1.0 {
        (hi - lo) as usize
    } else {
        0
    }
}

/// Wrap an angle difference into `(−π, π]`.
pub(crate) fn wrap(d: f64) -> f64 {
    let mut d = d % (2.0 * PI);
    if d > PI {
        d -= 2.0 * PI;
    } else if d <= -PI {
        d += 2.0 * PI;
    }
    d
}
