//! Exact propagation of `(y, y')` through piecewise-constant coefficients.
//!
//! On a piece where `q` and `ω` are constant, `-y'' = k² y` with
//! `k² = λω − q`, so the solution is a rotation (`k² > 0`), a hyperbolic
//! boost (`k² < 0`) or a shear (`k² = 0`). Oscillatory pieces are cut into
//! sub-steps with `k h < π/2`, which keeps every angle increment below π and
//! makes the unwrapped angle (and hence the zero count) unambiguous. On the
//! other two kinds of step the angle of `(κy, y')` moves by less than π no
//! matter how long the step is.

use super::{angle_of, boundary_data, interior_zeros, wrap, PruferTrajectory};
use crate::coefficients::{merge_breakpoints, SLProblem};
use crate::error::Result;

/// Largest phase `k h` of one oscillatory sub-step.
pub(crate) const MAX_PHASE: f64 = 1.5;
/// Largest `|k| h` of one hyperbolic sub-step; keeps `cosh` far from overflow.
const MAX_GROWTH: f64 = 4.0;
const RESCALE_HIGH: f64 = 1e100;
const RESCALE_LOW: f64 = 1e-100;

/// One constant-coefficient piece of a normal-form problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Piece {
    pub left: f64,
    pub right: f64,
    pub q: f64,
    pub omega: f64,
}

impl Piece {
    pub fn k2(&self, lambda: f64) -> f64 {
        lambda * self.omega - self.q
    }
}

pub(crate) fn pieces_of(prob: &SLProblem, extra: &[f64]) -> Vec<Piece> {
    let base = prob.breakpoints();
    let grid = if extra.is_empty() {
        base
    } else {
        merge_breakpoints(&[&base, extra])
    };
    grid.windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            Piece {
                left: w[0],
                right: w[1],
                q: prob.q().eval(mid),
                omega: prob.omega().eval(mid),
            }
        })
        .collect()
}

/// State at the start of a sub-step. `(y, yp)` are stored scaled down by
/// `exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Node {
    pub x: f64,
    pub y: f64,
    pub yp: f64,
    pub log_scale: f64,
    pub theta: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct Shot {
    pub lambda: f64,
    /// `nodes[i]` starts sub-step `i`; the last node is the right endpoint.
    pub nodes: Vec<Node>,
    /// `k²` and piece index of each sub-step.
    pub steps: Vec<(f64, usize)>,
}

/// Options for [`shoot`].
#[derive(Debug, Clone, Copy)]
pub(crate) struct ShotOptions {
    pub max_phase: f64,
    pub min_sub: usize,
    pub record: bool,
}

impl Default for ShotOptions {
    fn default() -> Self {
        Self {
            max_phase: MAX_PHASE,
            min_sub: 1,
            record: false,
        }
    }
}

/// Transfer matrix `[[a, b], [c, d]]` of a sub-step of length `h`.
#[inline]
pub(crate) fn transfer_matrix(k2: f64, h: f64) -> [f64; 4] {
    if k2 > 0.0 {
        let k = k2.sqrt();
        let (s, c) = (k * h).sin_cos();
        [c, h * sinc(k * h), -k * s, c]
    } else if k2 < 0.0 {
        let k = (-k2).sqrt();
        let (s, c) = ((k * h).sinh(), (k * h).cosh());
        [c, h * sinhc(k * h), k * s, c]
    } else {
        [1.0, h, 0.0, 1.0]
    }
}

pub(crate) fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        1.0 - z * z / 6.0
    } else {
        z.sin() / z
    }
}

pub(crate) fn sinhc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        1.0 + z * z / 6.0
    } else {
        z.sinh() / z
    }
}

/// `(z − sin z) / z³`
fn c3(z: f64) -> f64 {
    if z.abs() < 0.1 {
        let z2 = z * z;
        1.0 / 6.0 - z2 / 120.0 + z2 * z2 / 5040.0 - z2 * z2 * z2 / 362_880.0
    } else {
        (z - z.sin()) / (z * z * z)
    }
}

/// `(sinh z − z) / z³`
fn s3(z: f64) -> f64 {
    if z.abs() < 0.1 {
        let z2 = z * z;
        1.0 / 6.0 + z2 / 120.0 + z2 * z2 / 5040.0 + z2 * z2 * z2 / 362_880.0
    } else {
        (z.sinh() - z) / (z * z * z)
    }
}

fn substeps(k2: f64, len: f64, opts: &ShotOptions) -> usize {
    let phase = k2.abs().sqrt() * len;
    let limit = if k2 > 0.0 { opts.max_phase } else { MAX_GROWTH };
    let m = (phase / limit).ceil();
    (m as usize).max(opts.min_sub).max(1)
}

/// Propagate `init = (y(a), y'(a))` across `pieces` at spectral parameter
/// `lambda`, tracking the angle of `(κy, y')`.
pub(crate) fn shoot(
    pieces: &[Piece],
    lambda: f64,
    kappa: f64,
    init: (f64, f64),
    opts: ShotOptions,
) -> Shot {
    let (mut y, mut yp) = init;
    let mut log_scale = 0.0;
    let mut angle = angle_of(kappa, y, yp);
    let mut theta = angle;
    let x0 = pieces[0].left;
    let mut nodes = Vec::new();
    let mut steps = Vec::new();
    if opts.record {
        nodes.push(Node {
            x: x0,
            y,
            yp,
            log_scale,
            theta,
        });
    }
    for (idx, piece) in pieces.iter().enumerate() {
        let len = piece.right - piece.left;
        let k2 = piece.k2(lambda);
        let m = substeps(k2, len, &opts);
        let h = len / m as f64;
        let [a, b, c, d] = transfer_matrix(k2, h);
        for j in 0..m {
            let ny = a * y + b * yp;
            let nyp = c * y + d * yp;
            y = ny;
            yp = nyp;
            let size = y.abs().max(yp.abs());
            if !(RESCALE_LOW..=RESCALE_HIGH).contains(&size) {
                log_scale += size.ln();
                y /= size;
                yp /= size;
            }
            let next = angle_of(kappa, y, yp);
            theta += wrap(next - angle);
            angle = next;
            if opts.record {
                let x = if j + 1 == m {
                    piece.right
                } else {
                    piece.left + (j + 1) as f64 * h
                };
                nodes.push(Node {
                    x,
                    y,
                    yp,
                    log_scale,
                    theta,
                });
                steps.push((k2, idx));
            }
        }
    }
    if !opts.record {
        nodes.push(Node {
            x: pieces.last().unwrap().right,
            y,
            yp,
            log_scale,
            theta,
        });
    }
    Shot {
        lambda,
        nodes,
        steps,
    }
}

impl Shot {
    pub fn first(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn last(&self) -> &Node {
        self.nodes.last().unwrap()
    }

    pub fn theta_end(&self) -> f64 {
        self.last().theta
    }

    pub fn interior_zeros(&self, theta_start: f64) -> usize {
        interior_zeros(theta_start, self.theta_end())
    }

    /// `∫ y²` over sub-step `i`, in units of `exp(2 log_scale)` of its start node.
    pub fn step_square_integral(&self, i: usize) -> f64 {
        let n0 = &self.nodes[i];
        let len = self.nodes[i + 1].x - n0.x;
        let (k2, _) = self.steps[i];
        square_integral(k2, len, n0.y, n0.yp)
    }

    /// Largest `|y|` over sub-step `i`, in units of its start node's scale.
    pub fn step_max_abs(&self, i: usize) -> f64 {
        let n0 = &self.nodes[i];
        let len = self.nodes[i + 1].x - n0.x;
        let (k2, _) = self.steps[i];
        let [a, b, c, d] = transfer_matrix(k2, len);
        let y1 = a * n0.y + b * n0.yp;
        let yp1 = c * n0.y + d * n0.yp;
        let mut best = n0.y.abs().max(y1.abs());
        if n0.yp * yp1 < 0.0 {
            let interior = if k2 > 0.0 {
                n0.y.hypot(n0.yp / k2.sqrt())
            } else if k2 < 0.0 {
                let b = n0.yp / (-k2).sqrt();
                (n0.y * n0.y - b * b).max(0.0).sqrt()
            } else {
                0.0
            };
            best = best.max(interior);
        }
        best
    }

    /// `(y, y')` at an arbitrary `x` inside the recorded range.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let i = self
            .nodes
            .partition_point(|n| n.x <= x)
            .clamp(1, self.steps.len())
            - 1;
        let n0 = &self.nodes[i];
        let (k2, _) = self.steps[i];
        let [a, b, c, d] = transfer_matrix(k2, x - n0.x);
        let scale = n0.log_scale.exp();
        (
            scale * (a * n0.y + b * n0.yp),
            scale * (c * n0.y + d * n0.yp),
        )
    }

    pub fn into_trajectory(self, theta_start: f64) -> PruferTrajectory {
        let positive = self.lambda > 0.0;
        let oscillation_count = self.interior_zeros(theta_start);
        let mut out = PruferTrajectory {
            lambda: self.lambda,
            xs: Vec::with_capacity(self.nodes.len()),
            theta: Vec::new(),
            log_rho: Vec::new(),
            y: Vec::with_capacity(self.nodes.len()),
            yp: Vec::with_capacity(self.nodes.len()),
            oscillation_count,
        };
        for n in &self.nodes {
            let scale = n.log_scale.exp();
            out.xs.push(n.x);
            out.y.push(n.y * scale);
            out.yp.push(n.yp * scale);
            if positive {
                out.theta.push(n.theta);
                let r2 = self.lambda * n.y * n.y + n.yp * n.yp;
                out.log_rho.push(n.log_scale + 0.5 * r2.ln());
            }
        }
        out
    }
}

/// Closed form of `∫₀ʰ y(s)² ds` for `-y'' = k² y`, `y(0) = y0`, `y'(0) = yp0`.
pub(crate) fn square_integral(k2: f64, h: f64, y0: f64, yp0: f64) -> f64 {
    let x = k2.abs().sqrt() * h;
    let (even, cross, odd) = if k2 > 0.0 {
        (
            0.5 + 0.5 * sinc(2.0 * x),
            sinc(x) * sinc(x),
            2.0 * c3(2.0 * x),
        )
    } else if k2 < 0.0 {
        (
            0.5 + 0.5 * sinhc(2.0 * x),
            sinhc(x) * sinhc(x),
            2.0 * s3(2.0 * x),
        )
    } else {
        (1.0, 1.0, 1.0 / 3.0)
    };
    y0 * y0 * h * even + y0 * yp0 * h * h * cross + yp0 * yp0 * h * h * h * odd
}

/// Transfer-matrix trajectory of a normal-form problem at `lambda`, starting
/// from data on the left boundary condition. Each constant piece is split into
/// at least `n_sub` sub-steps (more where the solution oscillates).
pub fn propagate_transfer(prob: &SLProblem, lambda: f64, n_sub: usize) -> Result<PruferTrajectory> {
    prob.require_normal_form()?;
    let kappa = if lambda > 0.0 { lambda.sqrt() } else { 1.0 };
    let pieces = pieces_of(prob, &[]);
    let init = boundary_data(prob.alpha());
    let shot = shoot(
        &pieces,
        lambda,
        kappa,
        init,
        ShotOptions {
            min_sub: n_sub.max(1),
            record: true,
            ..Default::default()
        },
    );
    let theta_start = shot.first().theta;
    Ok(shot.into_trajectory(theta_start))
}
