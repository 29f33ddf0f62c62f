//! Independent reference computations for the integration tests.
//!
//! Nothing here calls into the solver: the shooter below works directly on
//! `(u, v) = (y, p y')`, counts half-turns of `atan2(u, v)` and bisects.
#![allow(dead_code)]

use std::f64::consts::PI;

use sturm_core::{PiecewiseFn, SLProblem};

#[derive(Clone, Copy)]
struct Seg {
    left: f64,
    right: f64,
    p: f64,
    q: f64,
    w: f64,
}

pub struct Shooter {
    segs: Vec<Seg>,
    alpha: f64,
    beta: f64,
}

/// Propagate `(u, v)` over length `h` of a constant segment.
fn step(s: &Seg, lambda: f64, h: f64, u: f64, v: f64) -> (f64, f64) {
    let k2 = (lambda * s.w - s.q) / s.p;
    if k2 > 0.0 {
        let k = k2.sqrt();
        let (sn, cs) = (k * h).sin_cos();
        (cs * u + sn / (k * s.p) * v, -k * s.p * sn * u + cs * v)
    } else if k2 < 0.0 {
        let k = (-k2).sqrt();
        let (sn, cs) = ((k * h).sinh(), (k * h).cosh());
        (cs * u + sn / (k * s.p) * v, k * s.p * sn * u + cs * v)
    } else {
        (u + h / s.p * v, v)
    }
}

fn unwrap(d: f64) -> f64 {
    let mut d = d;
    while d > PI {
        d -= 2.0 * PI;
    }
    while d <= -PI {
        d += 2.0 * PI;
    }
    d
}

impl Shooter {
    pub fn new(prob: &SLProblem) -> Self {
        let mut xs: Vec<f64> = prob
            .p()
            .breakpoints()
            .iter()
            .chain(prob.q().breakpoints())
            .chain(prob.omega().breakpoints())
            .copied()
            .collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
        let segs = xs
            .windows(2)
            .map(|w| {
                let m = 0.5 * (w[0] + w[1]);
                Seg {
                    left: w[0],
                    right: w[1],
                    p: prob.p().eval(m),
                    q: prob.q().eval(m),
                    w: prob.omega().eval(m),
                }
            })
            .collect();
        Self {
            segs,
            alpha: prob.alpha(),
            beta: prob.beta(),
        }
    }

    fn init(&self) -> (f64, f64) {
        if self.alpha == 0.0 {
            (0.0, 1.0)
        } else {
            (self.alpha.sin(), -self.alpha.cos())
        }
    }

    /// Unwrapped angle of `(u, v)` at the right end, starting in `[0, π)`.
    pub fn end_angle(&self, lambda: f64) -> f64 {
        let (mut u, mut v) = self.init();
        let mut th = u.atan2(v);
        for s in &self.segs {
            let k = ((lambda * s.w - s.q) / s.p).abs().sqrt();
            let m = ((k * (s.right - s.left)) / 0.5).ceil().max(1.0) as usize;
            let h = (s.right - s.left) / m as f64;
            for _ in 0..m {
                let (nu, nv) = step(s, lambda, h, u, v);
                let scale = nu.abs().max(nv.abs());
                let (nu, nv) = (nu / scale, nv / scale);
                th += unwrap(nu.atan2(nv) - u.atan2(v));
                u = nu;
                v = nv;
            }
        }
        th
    }

    fn target(&self) -> f64 {
        if self.beta == 0.0 {
            PI
        } else {
            self.beta.sin().atan2(-self.beta.cos())
        }
    }

    fn miss(&self, n: usize, lambda: f64) -> f64 {
        self.end_angle(lambda) - self.target() - (n - 1) as f64 * PI
    }

    /// The `n`-th eigenvalue by bracketing and plain bisection.
    pub fn eigenvalue(&self, n: usize) -> f64 {
        let mut lo = -1.0;
        while self.miss(n, lo) >= 0.0 {
            lo = 2.0 * lo - 1.0;
        }
        let mut hi = 1.0;
        while self.miss(n, hi) <= 0.0 {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.miss(n, mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// `(y, p y')` at each point of a sorted list.
    pub fn solution(&self, lambda: f64, xs: &[f64]) -> Vec<(f64, f64)> {
        let (mut u, mut v) = self.init();
        let mut out = Vec::with_capacity(xs.len());
        let mut x = self.segs[0].left;
        let mut idx = 0;
        for &target in xs {
            while idx < self.segs.len() && target > self.segs[idx].right {
                let s = self.segs[idx];
                (u, v) = step(&s, lambda, s.right - x, u, v);
                x = s.right;
                idx += 1;
            }
            let s = self.segs[idx.min(self.segs.len() - 1)];
            (u, v) = step(&s, lambda, target - x, u, v);
            x = target;
            out.push((u, v));
        }
        out
    }
}

/// Composite Simpson on `n` (even) panels of a sampled function.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// `q ≡ 0` Prüfer angle `θ` with `√λ y = ρ sin θ`, sampled on a uniform grid
/// of `m` panels per piece of `omega`, via exact sines and cosines.
pub fn free_angle(omega: &PiecewiseFn, lambda: f64, theta0: f64, m: usize) -> Vec<(f64, f64)> {
    let s = lambda.sqrt();
    let (mut y, mut yp) = (theta0.sin() / s, theta0.cos());
    let mut th = theta0;
    let mut out = vec![(omega.start(), th)];
    for (l, r, w) in omega.pieces() {
        let k = (lambda * w).sqrt();
        let h = (r - l) / m as f64;
        let (sn, cs) = (k * h).sin_cos();
        for j in 1..=m {
            let ny = cs * y + sn / k * yp;
            let nyp = -k * sn * y + cs * yp;
            th += unwrap((s * ny).atan2(nyp) - (s * y).atan2(yp));
            y = ny;
            yp = nyp;
            out.push((if j == m { r } else { l + j as f64 * h }, th));
        }
    }
    out
}

/// Simpson rule of `g(x) · f(θ(x))` over the samples of [`free_angle`] (each
/// piece has an even number of panels).
pub fn angle_integral(
    samples: &[(f64, f64)],
    omega: &PiecewiseFn,
    g: &PiecewiseFn,
    m: usize,
    f: impl Fn(f64) -> f64,
) -> f64 {
    let mut acc = 0.0;
    for (p, _) in omega.pieces().enumerate() {
        let chunk = &samples[p * m..=(p + 1) * m];
        let h = chunk[1].0 - chunk[0].0;
        let gv = g.eval(0.5 * (chunk[0].0 + chunk[m].0));
        let mut s = f(chunk[0].1) + f(chunk[m].1);
        for (i, c) in chunk.iter().enumerate().take(m).skip(1) {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(c.1);
        }
        acc += gv * s * h / 3.0;
    }
    acc
}

/// [`simpson`] on each interval between consecutive `breaks`; `f(x, mid)`
/// gets the midpoint of the current interval so that piecewise data can be
/// read off the right piece at the endpoints.
pub fn simpson_pieces(f: impl Fn(f64, f64) -> f64, breaks: &[f64], n: usize) -> f64 {
    breaks
        .windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            simpson(|x| f(x, mid), w[0], w[1], n)
        })
        .sum()
}
