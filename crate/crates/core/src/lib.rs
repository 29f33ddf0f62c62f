//! Regular Sturm–Liouville eigenvalue problems
//!
//! ```text
//!     -(p y')' + q y = λ ω y   on [a, b]
//!     y(a) cos α + (p y')(a) sin α = 0
//!     y(b) cos β + (p y')(b) sin β = 0
//! ```
//!
//! with piecewise-constant coefficients. Eigenvalues are located by shooting on
//! the scaled Prüfer angle, using either exact per-piece transfer matrices or an
//! adaptive Runge–Kutta integration of the angle equation. On top of the solver
//! sit the sensitivity tools (the eigenvalue derivative `h ↦ ∫ φₙ² h`, finite
//! difference checks, Lipschitz certificates in the potential) and a set of
//! experiments on the oscillatory integrals that control eigenfunction growth.

pub mod coefficients;
pub mod corpus;
pub mod eigensolver;
mod error;
pub mod lemma_lab;
pub mod prufer;
pub mod quadrature;
pub mod sensitivity;
pub mod stats;

pub use coefficients::{
    affine_combine, hypothesis_report, l1_norm, liouville_transform, HypothesisReport,
    Monotonicity, PiecewiseFn, ProblemFile, SLProblem,
};
pub use eigensolver::{
    eigenfunction, eigenvalue, eigenvalues_up_to, miss_distance, Backend, Eigenpair, SolverOptions,
};
pub use error::{Error, Result};
pub use prufer::{
    fundamental_pair, initial_angle, integrate_prufer, propagate_transfer, target_angle,
    FundamentalPair, PruferTrajectory,
};
pub use sensitivity::{
    derivative_functional, fd_derivative, lipschitz_ratio, path_bound, LipschitzReport,
};
