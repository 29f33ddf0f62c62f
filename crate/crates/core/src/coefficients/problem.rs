use std::f64::consts::PI;

use super::{merge_breakpoints, PiecewiseFn};
use crate::error::{Error, Result};

/// A regular Sturm–Liouville problem `-(p y')' + q y = λ ω y` on `[a, b]` with
/// separated boundary conditions
/// `y(a) cos α + (p y')(a) sin α = 0`, `y(b) cos β + (p y')(b) sin β = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SLProblem {
    p: PiecewiseFn,
    q: PiecewiseFn,
    omega: PiecewiseFn,
    alpha: f64,
    beta: f64,
}

impl SLProblem {
    pub fn new(
        p: PiecewiseFn,
        q: PiecewiseFn,
        omega: PiecewiseFn,
        alpha: f64,
        beta: f64,
    ) -> Result<Self> {
        p.check_same_interval(&q)?;
        p.check_same_interval(&omega)?;
        if let Some(v) = p.values().iter().find(|&&v| v <= 0.0) {
            return Err(Error::InvalidProblem(format!(
                "p must be positive, found piece value {v}"
            )));
        }
        if let Some(v) = omega.values().iter().find(|&&v| v <= 0.0) {
            return Err(Error::InvalidProblem(format!(
                "omega must be positive, found piece value {v}"
            )));
        }
        for (name, angle) in [("alpha", alpha), ("beta", beta)] {
            if !(0.0..PI).contains(&angle) {
                return Err(Error::InvalidProblem(format!(
                    "{name} = {angle} is outside [0, pi)"
                )));
            }
        }
        Ok(Self {
            p,
            q,
            omega,
            alpha,
            beta,
        })
    }

    /// Problem with `p ≡ 1` on the interval of `q`.
    pub fn normal(q: PiecewiseFn, omega: PiecewiseFn, alpha: f64, beta: f64) -> Result<Self> {
        let p = PiecewiseFn::constant(q.start(), q.end(), 1.0)?;
        Self::new(p, q, omega, alpha, beta)
    }

    /// Dirichlet conditions at both ends.
    pub fn dirichlet(q: PiecewiseFn, omega: PiecewiseFn) -> Result<Self> {
        Self::normal(q, omega, 0.0, 0.0)
    }

    pub fn p(&self) -> &PiecewiseFn {
        &self.p
    }

    pub fn q(&self) -> &PiecewiseFn {
        &self.q
    }

    pub fn omega(&self) -> &PiecewiseFn {
        &self.omega
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn a(&self) -> f64 {
        self.p.start()
    }

    pub fn b(&self) -> f64 {
        self.p.end()
    }

    pub fn is_normal_form(&self) -> bool {
        self.p.values().iter().all(|&v| v == 1.0)
    }

    pub(crate) fn require_normal_form(&self) -> Result<()> {
        if self.is_normal_form() {
            Ok(())
        } else {
            Err(Error::NotNormalForm)
        }
    }

    /// Same `p`, `ω` and boundary angles with a different potential.
    pub fn with_potential(&self, q: PiecewiseFn) -> Result<Self> {
        Self::new(self.p.clone(), q, self.omega.clone(), self.alpha, self.beta)
    }

    pub fn with_weight(&self, omega: PiecewiseFn) -> Result<Self> {
        Self::new(self.p.clone(), self.q.clone(), omega, self.alpha, self.beta)
    }

    pub fn with_angles(&self, alpha: f64, beta: f64) -> Result<Self> {
        Self::new(
            self.p.clone(),
            self.q.clone(),
            self.omega.clone(),
            alpha,
            beta,
        )
    }

    /// Union of the breakpoints of all three coefficients.
    pub fn breakpoints(&self) -> Vec<f64> {
        merge_breakpoints(&[
            self.p.breakpoints(),
            self.q.breakpoints(),
            self.omega.breakpoints(),
        ])
    }
}

/// The change of variable `s(x) = ∫_a^x dt / p(t)`.
#[derive(Debug, Clone)]
pub struct LiouvilleMap {
    xs: Vec<f64>,
    ss: Vec<f64>,
    p: Vec<f64>,
}

impl LiouvilleMap {
    pub fn new(p: &PiecewiseFn) -> Self {
        let mut ss = Vec::with_capacity(p.len() + 1);
        ss.push(0.0);
        for (l, r, v) in p.pieces() {
            let last = *ss.last().unwrap();
            ss.push(last + (r - l) / v);
        }
        Self {
            xs: p.breakpoints().to_vec(),
            ss,
            p: p.values().to_vec(),
        }
    }

    /// Length `c` of the transformed interval `[0, c]`.
    pub fn length(&self) -> f64 {
        *self.ss.last().unwrap()
    }

    pub fn forward(&self, x: f64) -> f64 {
        let k = self.xs.partition_point(|&b| b <= x).clamp(1, self.p.len()) - 1;
        if x >= *self.xs.last().unwrap() {
            return self.length();
        }
        self.ss[k] + (x - self.xs[k]) / self.p[k]
    }

    pub fn inverse(&self, s: f64) -> f64 {
        let k = self.ss.partition_point(|&b| b <= s).clamp(1, self.p.len()) - 1;
        if s >= self.length() {
            return *self.xs.last().unwrap();
        }
        self.xs[k] + (s - self.ss[k]) * self.p[k]
    }

    /// Transport a coefficient that multiplies `y` (such as `q`, `ω`, or a
    /// perturbation direction) to the `s` variable: the new piece value is
    /// `p · f` because `dx = p ds`.
    pub fn transport(&self, p: &PiecewiseFn, f: &PiecewiseFn) -> Result<PiecewiseFn> {
        let grid = merge_breakpoints(&[p.breakpoints(), f.breakpoints()]);
        let mut s_grid: Vec<f64> = grid.iter().map(|&x| self.forward(x)).collect();
        s_grid[0] = 0.0;
        *s_grid.last_mut().unwrap() = self.length();
        let values = grid
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                p.eval(mid) * f.eval(mid)
            })
            .collect();
        PiecewiseFn::new(s_grid, values)
    }
}

/// Reduce a problem to normal form `-ỹ'' + q̃ ỹ = λ ω̃ ỹ` on `[0, c]`.
/// The boundary angles carry over unchanged and the spectrum is preserved.
pub fn liouville_transform(prob: &SLProblem) -> Result<SLProblem> {
    if let Some(v) = prob.p.values().iter().find(|&&v| v <= 0.0) {
        return Err(Error::InvalidProblem(format!(
            "p must be positive, found piece value {v}"
        )));
    }
    let map = LiouvilleMap::new(&prob.p);
    let q = map.transport(&prob.p, &prob.q)?;
    let omega = map.transport(&prob.p, &prob.omega)?;
    let p = PiecewiseFn::constant(0.0, map.length(), 1.0)?;
    SLProblem::new(p, q, omega, prob.alpha, prob.beta)
}
