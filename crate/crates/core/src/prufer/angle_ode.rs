use std::f64::consts::TAU;

use super::rk::Stepper;
use super::{
    boundary_data, initial_angle_scaled, interior_zeros, PruferTrajectory, DEFAULT_RK_TOL,
};
use crate::coefficients::{merge_breakpoints, PiecewiseFn, SLProblem};
use crate::error::{require_positive, Result};

/// Settings for the Runge–Kutta Prüfer backend.
#[derive(Debug, Clone, PartialEq)]
pub struct PruferConfig {
    /// Absolute error allowed per unit length.
    pub tol: f64,
    /// Starting angle; defaults to the one fixed by the left boundary angle.
    pub theta0: Option<f64>,
    /// Uniform sample points added on top of the coefficient breakpoints.
    pub samples: usize,
}

impl Default for PruferConfig {
    fn default() -> Self {
        Self {
            tol: DEFAULT_RK_TOL,
            theta0: None,
            samples: 256,
        }
    }
}

/// Output of [`integrate_angle_system`]: at each node, `θ`, `ln ρ`,
/// `∫ g sin 2θ` and `∫ g cos 2θ` accumulated from the left end.
#[derive(Debug, Clone)]
pub(crate) struct AngleRun {
    pub xs: Vec<f64>,
    pub states: Vec<[f64; 4]>,
}

/// Integrate the Prüfer system for `-y'' + q y = λ ω y` together with the
/// oscillatory integrals of `g`. Every breakpoint of `q`, `ω`, `g` and every
/// entry of `outputs` is a mandatory step boundary.
pub(crate) fn integrate_angle_system(
    q: &PiecewiseFn,
    omega: &PiecewiseFn,
    g: Option<&PiecewiseFn>,
    lambda: f64,
    theta0: f64,
    log_rho0: f64,
    tol: f64,
    outputs: &[f64],
) -> Result<AngleRun> {
    require_positive("lambda", lambda)?;
    require_positive("tol", tol)?;
    let mut sets: Vec<&[f64]> = vec![q.breakpoints(), omega.breakpoints()];
    if let Some(g) = g {
        sets.push(g.breakpoints());
    }
    let mut out_pts = vec![omega.start()];
    out_pts.extend(
        outputs
            .iter()
            .copied()
            .filter(|&x| x > omega.start() && x < omega.end()),
    );
    out_pts.push(omega.end());
    sets.push(&out_pts);
    let grid = merge_breakpoints(&sets);

    let s = lambda.sqrt();
    let rate = s * omega.max_value().max(1.0) + q.l1_norm().max(q.max_value().abs()) / s + 1.0;
    let mut stepper = Stepper::periodic(tol, 0.05 / rate);
    let turns = (theta0 / TAU).floor();
    stepper.turns = turns as i64;
    let mut state = [theta0 - turns * TAU, log_rho0, 0.0, 0.0];
    let mut states = Vec::with_capacity(grid.len());
    states.push([theta0, log_rho0, 0.0, 0.0]);
    for w in grid.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        let (qv, wv) = (q.eval(mid), omega.eval(mid));
        let gv = g.map_or(0.0, |g| g.eval(mid));
        let radial = 0.5 * s * (1.0 - wv + qv / lambda);
        let rhs = |y: &[f64; 4]| {
            let (sn, cs) = y[0].sin_cos();
            let sn2 = sn * sn;
            let (s2, c2) = (2.0 * sn * cs, cs * cs - sn2);
            [
                s * (cs * cs + wv * sn2) - qv / s * sn2,
                radial * s2,
                gv * s2,
                gv * c2,
            ]
        };
        stepper.advance(&rhs, w[0], w[1], &mut state)?;
        states.push([stepper.unreduced(state[0]), state[1], state[2], state[3]]);
    }
    Ok(AngleRun { xs: grid, states })
}

/// Prüfer angle and radius of a normal-form problem by adaptive Runge–Kutta
/// integration, sampled at the breakpoints plus 256 uniform points.
pub fn integrate_prufer(prob: &SLProblem, lambda: f64, tol: f64) -> Result<PruferTrajectory> {
    integrate_prufer_with(
        prob,
        lambda,
        &PruferConfig {
            tol,
            ..Default::default()
        },
    )
}

pub fn integrate_prufer_with(
    prob: &SLProblem,
    lambda: f64,
    cfg: &PruferConfig,
) -> Result<PruferTrajectory> {
    prob.require_normal_form()?;
    require_positive("lambda", lambda)?;
    require_positive("tol", cfg.tol)?;
    let s = lambda.sqrt();
    let (theta0, log_rho0) = match cfg.theta0 {
        Some(t) => (t, 0.0),
        None => {
            let (y0, yp0) = boundary_data(prob.alpha());
            (
                initial_angle_scaled(prob.alpha(), s),
                0.5 * (lambda * y0 * y0 + yp0 * yp0).ln(),
            )
        }
    };
    let (a, b) = (prob.a(), prob.b());
    let outputs: Vec<f64> = (1..cfg.samples)
        .map(|i| a + (b - a) * i as f64 / cfg.samples as f64)
        .collect();
    let run = integrate_angle_system(
        prob.q(),
        prob.omega(),
        None,
        lambda,
        theta0,
        log_rho0,
        cfg.tol,
        &outputs,
    )?;
    let theta: Vec<f64> = run.states.iter().map(|st| st[0]).collect();
    let log_rho: Vec<f64> = run.states.iter().map(|st| st[1]).collect();
    let y = theta
        .iter()
        .zip(&log_rho)
        .map(|(t, r)| r.exp() * t.sin() / s)
        .collect();
    let yp = theta
        .iter()
        .zip(&log_rho)
        .map(|(t, r)| r.exp() * t.cos())
        .collect();
    let oscillation_count = interior_zeros(theta0, *theta.last().unwrap());
    Ok(PruferTrajectory {
        lambda,
        xs: run.xs,
        theta,
        log_rho,
        y,
        yp,
        oscillation_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prufer::propagate_transfer;

    fn unit(v: f64) -> PiecewiseFn {
        PiecewiseFn::constant(0.0, 1.0, v).unwrap()
    }

    #[test]
    fn free_angle_is_linear() {
        let prob = SLProblem::dirichlet(unit(0.0), unit(1.0)).unwrap();
        for lambda in [0.5, 10.0, 1234.5, 1e5] {
            let t = integrate_prufer(&prob, lambda, 1e-10).unwrap();
            for (x, th) in t.xs.iter().zip(&t.theta) {
                assert!((th - lambda.sqrt() * x).abs() < 1e-10);
            }
            let r0 = t.log_rho[0];
            assert!(t.log_rho.iter().all(|r| (r - r0).abs() < 1e-12));
        }
    }

    #[test]
    fn agrees_with_transfer_backend() {
        let q = PiecewiseFn::new(vec![0.0, 0.3, 0.8, 1.0], vec![5.0, 5.0, 5.0]).unwrap();
        let omega = PiecewiseFn::new(vec![0.0, 0.5, 1.0], vec![2.0, 2.0]).unwrap();
        let prob = SLProblem::normal(q, omega, 0.7, 1.9).unwrap();
        let rk = integrate_prufer(&prob, 50.0, 1e-10).unwrap();
        let tm = propagate_transfer(&prob, 50.0, 8).unwrap();
        let d = rk.theta_end().unwrap() - tm.theta_end().unwrap();
        assert!(d.abs() < 1e-7, "{d}");
        assert_eq!(rk.oscillation_count, tm.oscillation_count);
    }

    #[test]
    fn rejects_bad_parameters() {
        let prob = SLProblem::dirichlet(unit(0.0), unit(1.0)).unwrap();
        assert!(integrate_prufer(&prob, 0.0, 1e-10).is_err());
        assert!(integrate_prufer(&prob, 1.0, 0.0).is_err());
        let general = SLProblem::new(unit(3.0), unit(0.0), unit(1.0), 0.0, 0.0).unwrap();
        assert!(integrate_prufer(&general, 1.0, 1e-10).is_err());
    }
}
