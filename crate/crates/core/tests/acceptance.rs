//! End-to-end acceptance checks. Each check prints one `PASS`/`FAIL` line;
//! the process exits non-zero if any check fails.

mod common;

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::Rng;
use sturm_core::corpus::{
    problem_corpus, random_general_problem, random_monotone, random_piecewise, random_potential,
    random_problem, rng,
};
use sturm_core::eigensolver::Solver;
use sturm_core::lemma_lab::{
    g0_bound, geometric_grid, h_field, oscillatory_profile, oscillatory_sup, supnorm_sweep,
    voc_residual, Component, DecaySeries,
};
use sturm_core::sensitivity::{derivative_functional, fd_derivative, lipschitz_ratio, PATH_NODES};
use sturm_core::stats::spearman;
use sturm_core::{
    affine_combine, integrate_prufer, liouville_transform, propagate_transfer, Backend,
    PiecewiseFn, SLProblem, SolverOptions,
};

use common::Shooter;

type Outcome = (bool, String);

fn unit(v: f64) -> PiecewiseFn {
    PiecewiseFn::constant(0.0, 1.0, v).unwrap()
}

/// The λ grid used for trend statistics.
fn trend_grid() -> Vec<f64> {
    geometric_grid(1e2, 1e6, 65).unwrap()
}

fn c_grid() -> Vec<f64> {
    (0..=100).map(|i| i as f64 / 100.0).collect()
}

fn closed_form_spectrum() -> Outcome {
    let start = Instant::now();
    let dir = SLProblem::dirichlet(unit(0.0), unit(1.0)).unwrap();
    let neu = dir.with_angles(PI / 2.0, PI / 2.0).unwrap();
    let opts = SolverOptions::default();
    let ld = Solver::new(&dir, opts)
        .unwrap()
        .eigenvalues_up_to(50)
        .unwrap();
    let ln = Solver::new(&neu, opts)
        .unwrap()
        .eigenvalues_up_to(50)
        .unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let mut worst = 0.0f64;
    for n in 1..=50 {
        let exact = (n as f64 * PI).powi(2);
        worst = worst.max((ld[n - 1] - exact).abs() / exact);
        let exact = ((n - 1) as f64 * PI).powi(2);
        worst = worst.max((ln[n - 1] - exact).abs() / exact.max(1.0));
    }
    (
        worst <= 1e-8 && elapsed < 1.0,
        format!("max rel err {worst:.2e}, {elapsed:.3} s for 100 eigenvalues"),
    )
}

fn shift_covariance() -> Outcome {
    let mut r = rng(2);
    let opts = SolverOptions::with_tol(1e-13);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let pieces = r.gen_range(2..8);
        let q = random_potential(&mut r, pieces, 10.0);
        let (a, b) = (r.gen_range(0.0..PI), r.gen_range(0.0..PI));
        let prob = SLProblem::normal(q.clone(), unit(1.0), a, b).unwrap();
        let base = Solver::new(&prob, opts)
            .unwrap()
            .eigenvalues_up_to(20)
            .unwrap();
        for c in [-5.0, 3.0] {
            let shifted = prob.with_potential(q.map(|v| v + c).unwrap()).unwrap();
            let ls = Solver::new(&shifted, opts)
                .unwrap()
                .eigenvalues_up_to(20)
                .unwrap();
            for (x, y) in base.iter().zip(&ls) {
                worst = worst.max((y - x - c).abs());
            }
        }
    }
    (
        worst <= 1e-7,
        format!("max |Δλ − c| {worst:.2e} over 20 potentials, n ≤ 20"),
    )
}

fn liouville_invariance() -> Outcome {
    let mut r = rng(3);
    let opts = SolverOptions::with_tol(1e-12);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let prob = random_general_problem(&mut r);
        let direct = Shooter::new(&prob);
        let normal = liouville_transform(&prob).unwrap();
        let ls = Solver::new(&normal, opts)
            .unwrap()
            .eigenvalues_up_to(20)
            .unwrap();
        for (n, l) in ls.iter().enumerate() {
            let want = direct.eigenvalue(n + 1);
            worst = worst.max((l - want).abs() / want.abs().max(1.0));
        }
    }
    (
        worst <= 1e-7,
        format!("max rel diff {worst:.2e} over 10 problems, n ≤ 20"),
    )
}

fn derivative_formula() -> Outcome {
    let mut r = rng(4);
    let eps = [1e-2, 1e-3, 1e-4];
    let mut worst_order = f64::INFINITY;
    let mut worst_unit = 0.0f64;
    for _ in 0..5 {
        let prob = random_problem(&mut r);
        let h = random_piecewise(&mut r, 0.0, 1.0, 5, -300.0, 300.0);
        for n in 1..=10 {
            let exact = derivative_functional(&prob, n, &h).unwrap();
            let errs: Vec<f64> = eps
                .iter()
                .map(|&e| {
                    (fd_derivative(&prob, n, &h, e).unwrap() - exact)
                        .abs()
                        .max(1e-300)
                })
                .collect();
            let xs: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
            let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
            let order = sturm_core::stats::slope(&xs, &ys).unwrap();
            worst_order = worst_order.min(order);
            let d = derivative_functional(&prob, n, prob.omega()).unwrap();
            worst_unit = worst_unit.max((d - 1.0).abs());
        }
    }
    (
        worst_order >= 1.8 && worst_unit <= 1e-8,
        format!("min observed order {worst_order:.3}, max |D_ω − 1| {worst_unit:.2e}"),
    )
}

fn lipschitz_certificate() -> Outcome {
    let mut r = rng(5);
    let mut worst_flat = 0.0f64;
    let mut worst_bound = 0.0f64;
    let mut ok = true;
    for _ in 0..10 {
        let pieces = r.gen_range(1..6);
        let inc = r.gen_bool(0.5);
        let omega = random_monotone(&mut r, pieces, 0.5, 4.0, inc);
        let (n1, n2) = (r.gen_range(2..8), r.gen_range(2..8));
        let q1 = random_potential(&mut r, n1, 5.0);
        let q2 = random_potential(&mut r, n2, 5.0);
        let template = SLProblem::dirichlet(unit(0.0), omega).unwrap();
        let rep = lipschitz_ratio(&template, &q1, &q2, 100).unwrap();
        let flat = rep.max_ratio(51, 100) / rep.max_ratio(1, 50);
        let path: Vec<PiecewiseFn> = PATH_NODES
            .iter()
            .map(|&t| affine_combine(&q1, &q2, t).unwrap())
            .collect();
        let m_hat = supnorm_sweep(&template, &path, 100).unwrap().m_hat;
        let bound = rep.sup_ratio / (m_hat * m_hat);
        worst_flat = worst_flat.max(flat);
        worst_bound = worst_bound.max(bound);
        ok &= flat <= 1.05 && bound <= 1.05;
    }
    (
        ok,
        format!("max tail/head ratio {worst_flat:.3}, max sup ratio / M̂² {worst_bound:.3}"),
    )
}

fn g0_certificate() -> Outcome {
    let mut r = rng(6);
    let grid = trend_grid();
    let cs = c_grid();
    let mut worst_g = 0.0f64;
    let mut worst_trend = f64::NEG_INFINITY;
    let mut ok = true;
    for _ in 0..5 {
        let (pg, pw) = (r.gen_range(1..6), r.gen_range(1..6));
        let g = random_monotone(&mut r, pg, 0.0, 3.0, false);
        let omega = random_monotone(&mut r, pw, 0.5, 4.0, true);
        let bound = g0_bound(&g, &omega).unwrap().g0_half;
        let mut raw = Vec::with_capacity(grid.len());
        for &l in &grid {
            let prof = oscillatory_profile(&omega, &g, l, 0.0, &cs).unwrap();
            let sup = prof.iter().fold(0.0f64, |m, (s, _)| m.max(s.abs()));
            if l >= 1e3 {
                let ratio = 0.5 * l.sqrt() * sup / bound;
                worst_g = worst_g.max(ratio);
                ok &= ratio <= 1.01;
            }
            raw.push(sup);
        }
        let series = DecaySeries::new(grid.clone(), raw).unwrap();
        worst_trend = worst_trend.max(series.trend().unwrap_or(0.0));
        ok &= series.is_flat();
    }
    (
        ok,
        format!("max |G| / (G₀/2) {worst_g:.3}, max trend {worst_trend:.3}"),
    )
}

fn h_field_bounded() -> Outcome {
    let mut r = rng(7);
    let grid = trend_grid();
    let mut worst_trend = f64::NEG_INFINITY;
    let mut worst_sup = 0.0f64;
    let mut ok = true;
    for _ in 0..5 {
        let pieces = r.gen_range(2..6);
        let inc = r.gen_bool(0.5);
        let omega = random_monotone(&mut r, pieces, 0.5, 4.0, inc);
        let sups: Vec<f64> = grid
            .iter()
            .map(|&l| h_field(&omega, l, 0.0).unwrap().sup)
            .collect();
        let rho = spearman(&grid, &sups).unwrap_or(0.0);
        worst_trend = worst_trend.max(rho);
        worst_sup = sups.iter().fold(worst_sup, |m, &v| m.max(v));
        ok &= rho <= 0.3;
    }
    let flat = grid.iter().all(|&l| {
        h_field(&unit(1.0), l, 0.0)
            .unwrap()
            .values
            .iter()
            .all(|&v| v == 0.0)
    });
    (
        ok && flat,
        format!("max trend {worst_trend:.3}, max sup H {worst_sup:.3}, ω ≡ 1 exactly zero: {flat}"),
    )
}

fn spike_integrals_decay() -> Outcome {
    let omega = PiecewiseFn::new(
        vec![0.0, 0.05, 0.2, 0.5, 0.8, 1.0],
        vec![10.0, 3.0, 1.0, 0.1, 1e-3],
    )
    .unwrap();
    let g = PiecewiseFn::new(vec![0.0, 0.02, 0.03, 1.0], vec![0.0, 100.0, 0.0]).unwrap();
    let theta0s: Vec<f64> = (0..8).map(|k| k as f64 * PI / 8.0).collect();
    let cs = c_grid();
    let ratio = |comp| {
        let lo = oscillatory_sup(&omega, &g, 1e2, &theta0s, &cs, comp).unwrap();
        let hi = oscillatory_sup(&omega, &g, 1e6, &theta0s, &cs, comp).unwrap();
        hi.abs() / lo.abs()
    };
    let (s, c) = (ratio(Component::Sine), ratio(Component::Cosine));
    (
        s < 0.1 && c < 0.1,
        format!("sine ratio {s:.4}, cosine ratio {c:.4} (λ = 10⁶ over λ = 10²)"),
    )
}

fn voc_asymptotics() -> Outcome {
    let mut r = rng(9);
    let grid = trend_grid();
    let mut worst_trend = f64::NEG_INFINITY;
    let mut worst_scaled = 0.0f64;
    let mut ok = true;
    for _ in 0..5 {
        let pq = r.gen_range(2..8);
        let q = random_potential(&mut r, pq, 10.0);
        let pw = r.gen_range(1..6);
        let inc = r.gen_bool(0.5);
        let omega = random_monotone(&mut r, pw, 0.5, 4.0, inc);
        let raw: Vec<f64> = grid
            .iter()
            .map(|&l| voc_residual(&omega, &q, 1.0, 0.0, l).unwrap())
            .collect();
        let series = DecaySeries::new(grid.clone(), raw).unwrap();
        worst_trend = worst_trend.max(series.trend().unwrap_or(0.0));
        worst_scaled = series
            .scaled_values
            .iter()
            .fold(worst_scaled, |m, &v| m.max(v));
        ok &= series.is_flat();
    }
    (
        ok,
        format!("max trend {worst_trend:.3}, max √λ·residual {worst_scaled:.3}"),
    )
}

fn backend_equivalence() -> Outcome {
    let corpus = problem_corpus(10, 20);
    let tol = 1e-9;
    let mut worst_theta = 0.0f64;
    let mut worst_lambda = 0.0f64;
    for prob in &corpus {
        for l in [1.0, 10.0, 1e2, 1e3, 1e4] {
            let a = propagate_transfer(prob, l, 4).unwrap().theta_end().unwrap();
            let b = integrate_prufer(prob, l, 1e-10)
                .unwrap()
                .theta_end()
                .unwrap();
            worst_theta = worst_theta.max((a - b).abs());
        }
        let t = Solver::new(prob, SolverOptions::with_tol(tol)).unwrap();
        let p = Solver::new(
            prob,
            SolverOptions {
                backend: Backend::Prufer,
                ..SolverOptions::with_tol(tol)
            },
        )
        .unwrap();
        let (lt, lp) = (
            t.eigenvalues_up_to(10).unwrap(),
            p.eigenvalues_up_to(10).unwrap(),
        );
        for (x, y) in lt.iter().zip(&lp) {
            worst_lambda = worst_lambda.max((x - y).abs() / (tol * x.abs().max(1.0)));
        }
    }
    (
        worst_theta <= 1e-7 && worst_lambda <= 100.0,
        format!("max |Δθ(1)| {worst_theta:.2e}, max |Δλ| / tol {worst_lambda:.2}"),
    )
}

fn main() {
    let checks: [(&str, fn() -> Outcome); 10] = [
        ("closed-form spectrum", closed_form_spectrum),
        ("shift covariance", shift_covariance),
        ("liouville invariance", liouville_invariance),
        ("derivative formula", derivative_formula),
        ("lipschitz certificate", lipschitz_certificate),
        ("G0 certificate", g0_certificate),
        ("H field bounded", h_field_bounded),
        ("spike integrals decay", spike_integrals_decay),
        ("variation of constants asymptotics", voc_asymptotics),
        ("backend equivalence", backend_equivalence),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|_| (false, "panicked".to_string()));
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {name}: {verdict}  {detail}  [{:.2} s]",
            i + 1,
            start.elapsed().as_secs_f64()
        );
        failed += usize::from(!pass);
    }
    println!(
        "{} of {} criteria passed",
        checks.len() - failed,
        checks.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
