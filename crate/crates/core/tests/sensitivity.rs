use proptest::prelude::*;
use sturm_core::corpus::{random_monotone, random_potential, random_problem, rng};
use sturm_core::eigensolver::Solver;
use sturm_core::sensitivity::{path_bounds_gauss, DEFAULT_T_NODES};
use sturm_core::{
    derivative_functional, fd_derivative, lipschitz_ratio, path_bound, Error, PiecewiseFn,
    SLProblem, SolverOptions,
};

fn unit(v: f64) -> PiecewiseFn {
    PiecewiseFn::constant(0.0, 1.0, v).unwrap()
}

#[test]
fn unit_direction_on_free_problem() {
    let prob = SLProblem::dirichlet(unit(0.0), unit(1.0)).unwrap();
    for n in 1..=5 {
        assert!((derivative_functional(&prob, n, &unit(1.0)).unwrap() - 1.0).abs() < 1e-12);
        assert!((fd_derivative(&prob, n, &unit(1.0), 1e-3).unwrap() - 1.0).abs() < 1e-8);
    }
}

#[test]
fn localized_direction_matches_sine_moment() {
    // ∫_0^{1/2} 2 sin²(nπx) dx = 1/2 for every n
    let prob = SLProblem::dirichlet(unit(0.0), unit(1.0)).unwrap();
    let h = PiecewiseFn::uniform(0.0, 1.0, vec![1.0, 0.0]).unwrap();
    for n in 1..=6 {
        assert!((derivative_functional(&prob, n, &h).unwrap() - 0.5).abs() < 1e-12);
    }
    let h = PiecewiseFn::new(vec![0.0, 0.25, 1.0], vec![1.0, 0.0]).unwrap();
    let exact =
        |n: f64| 0.25 - (n * std::f64::consts::PI / 2.0).sin() / (2.0 * n * std::f64::consts::PI);
    for n in 1..=6 {
        let got = derivative_functional(&prob, n, &h).unwrap();
        assert!((got - exact(n as f64)).abs() < 1e-12, "n = {n}: {got}");
    }
}

#[test]
fn general_p_direction_is_transported() {
    // λₙ(p ≡ 4) = 4 n²π², and adding ε to q shifts every eigenvalue by ε
    let prob = SLProblem::new(unit(4.0), unit(0.0), unit(1.0), 0.0, 0.0).unwrap();
    for n in 1..=4 {
        assert!((derivative_functional(&prob, n, &unit(1.0)).unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn constant_shift_pair_has_unit_ratio() {
    let template = SLProblem::dirichlet(unit(0.0), unit(1.0)).unwrap();
    let q1 = PiecewiseFn::uniform(0.0, 1.0, vec![1.0, -2.0, 0.5]).unwrap();
    let q2 = q1.map(|v| v + 1.5).unwrap();
    let rep = lipschitz_ratio(&template, &q1, &q2, 20).unwrap();
    assert!(rep.ratios.iter().all(|r| (r - 1.0).abs() < 1e-8));
    assert!(rep.pass);
    let t: Vec<f64> = (0..=4).map(|i| i as f64 / 4.0).collect();
    assert!((path_bound(&template, &q1, &q2, 7, &t).unwrap() - 1.5).abs() < 1e-10);
}

#[test]
fn identical_potentials_are_degenerate() {
    let template = SLProblem::dirichlet(unit(0.0), unit(1.0)).unwrap();
    let q = unit(3.0);
    assert!(matches!(
        lipschitz_ratio(&template, &q, &q, 5),
        Err(Error::Degenerate(_))
    ));
    assert!(path_bound(&template, &q, &unit(1.0), 1, &[0.0, 0.5]).is_err());
}

#[test]
fn bound_chain_holds() {
    let mut r = rng(21);
    for _ in 0..3 {
        let omega = random_monotone(&mut r, 3, 0.5, 4.0, true);
        let q1 = random_potential(&mut r, 4, 5.0);
        let q2 = random_potential(&mut r, 5, 5.0);
        let template = SLProblem::dirichlet(unit(0.0), omega).unwrap();
        let rep = lipschitz_ratio(&template, &q1, &q2, 30).unwrap();
        let paths = path_bounds_gauss(
            &template,
            &q1,
            &q2,
            30,
            DEFAULT_T_NODES,
            &SolverOptions::default(),
        )
        .unwrap();
        for n in 1..=30 {
            let gap = (rep.lambda_q1[n - 1] - rep.lambda_q2[n - 1]).abs();
            assert!(gap <= paths[n - 1] * (1.0 + 1e-6) + 1e-12, "n = {n}");
            assert!(paths[n - 1] <= rep.bound * rep.distance * 1.05, "n = {n}");
        }
    }
}

fn problem() -> impl Strategy<Value = SLProblem> {
    any::<u64>().prop_map(|seed| random_problem(&mut rng(seed)))
}

fn direction() -> impl Strategy<Value = PiecewiseFn> {
    prop::collection::vec(-50.0f64..50.0, 1..6)
        .prop_map(|v| PiecewiseFn::uniform(0.0, 1.0, v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn derivative_agrees_with_central_difference(prob in problem(), h in direction(), n in 1usize..8) {
        let exact = derivative_functional(&prob, n, &h).unwrap();
        let fd = fd_derivative(&prob, n, &h, 1e-3).unwrap();
        prop_assert!((exact - fd).abs() < 1e-5 * (1.0 + h.l1_norm()));
    }

    #[test]
    fn weight_direction_gives_one(prob in problem(), n in 1usize..10) {
        let d = derivative_functional(&prob, n, prob.omega()).unwrap();
        prop_assert!((d - 1.0).abs() < 1e-10);
    }

    #[test]
    fn ratio_is_symmetric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let q1 = random_potential(&mut r, 3, 5.0);
        let q2 = random_potential(&mut r, 4, 5.0);
        let template = SLProblem::dirichlet(unit(0.0), random_monotone(&mut r, 2, 0.5, 4.0, false)).unwrap();
        let a = lipschitz_ratio(&template, &q1, &q2, 8).unwrap();
        let b = lipschitz_ratio(&template, &q2, &q1, 8).unwrap();
        prop_assert_eq!(a.ratios, b.ratios);
        prop_assert_eq!(a.distance, b.distance);
    }

    #[test]
    fn square_moment_is_a_probability(prob in problem(), n in 1usize..8) {
        let solver = Solver::new(&prob, SolverOptions::default()).unwrap();
        let l = solver.eigenvalue(n).unwrap();
        let w = solver.square_moment(l, prob.omega()).unwrap();
        prop_assert!((w - 1.0).abs() < 1e-10);
    }
}
