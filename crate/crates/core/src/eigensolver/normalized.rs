use std::f64::consts::PI;

use crate::prufer::transfer::{shoot, Node, Piece, Shot, ShotOptions};
use crate::prufer::{angle_of, boundary_data, initial_angle_scaled, wrap};

/// Phase of one sampling sub-step; gives 8 samples per half-period.
const SAMPLE_PHASE: f64 = PI / 8.0;

/// A recorded shot at an eigenvalue together with its `L²_ω` normalization.
///
/// The shot is spliced from solutions started at both ends, so that each one
/// is only used where it grows in its direction of integration.
///
/// Node `i` holds `(y, y')` scaled by `exp(-log_scale_i)`; the factor that
/// turns it into the normalized eigenfunction is
/// `exp(log_scale_i − log_ref) / norm`, which never overflows.
#[derive(Debug, Clone)]
pub(crate) struct NormalizedShot {
    shot: Shot,
    pieces: Vec<Piece>,
    theta_start: f64,
    log_ref: f64,
    norm: f64,
}

impl NormalizedShot {
    pub fn new(pieces: Vec<Piece>, lambda: f64, alpha: f64, beta: f64) -> Self {
        let kappa = if lambda > 0.0 { lambda.sqrt() } else { 1.0 };
        let shot = two_sided(&pieces, lambda, kappa, alpha, beta);
        let log_ref = shot
            .nodes
            .iter()
            .map(|n| n.log_scale)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut out = Self {
            shot,
            pieces,
            theta_start: initial_angle_scaled(alpha, kappa),
            log_ref,
            norm: 1.0,
        };
        let mass = out.integral(|_| 1.0);
        out.norm = mass.sqrt();
        out
    }

    fn factor(&self, i: usize) -> f64 {
        (self.shot.nodes[i].log_scale - self.log_ref).exp() / self.norm
    }

    /// `∫ ω y² h` over the whole interval, with `h` evaluated at piece midpoints.
    pub fn integral(&self, h: impl Fn(f64) -> f64) -> f64 {
        self.sum(|p| p.omega * h(0.5 * (p.left + p.right)))
    }

    /// `∫ y² h` (no weight).
    pub fn unweighted_integral(&self, h: impl Fn(f64) -> f64) -> f64 {
        self.sum(|p| h(0.5 * (p.left + p.right)))
    }

    fn sum(&self, density: impl Fn(&Piece) -> f64) -> f64 {
        let mut acc = 0.0;
        for (i, &(_, idx)) in self.shot.steps.iter().enumerate() {
            let d = density(&self.pieces[idx]);
            if d != 0.0 {
                let f = self.factor(i);
                acc += d * self.shot.step_square_integral(i) * f * f;
            }
        }
        acc
    }

    pub fn beta(&self) -> f64 {
        (-self.log_ref).exp() / self.norm
    }

    pub fn sup_norm(&self) -> f64 {
        (0..self.shot.steps.len())
            .map(|i| self.shot.step_max_abs(i) * self.factor(i))
            .fold(0.0, f64::max)
    }

    pub fn oscillations(&self) -> usize {
        self.shot.interior_zeros(self.theta_start)
    }

    /// Node positions with normalized `(φ, φ')`.
    pub fn samples(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let n = self.shot.nodes.len();
        let (mut xs, mut phi, mut dphi) = (
            Vec::with_capacity(n),
            Vec::with_capacity(n),
            Vec::with_capacity(n),
        );
        for (i, node) in self.shot.nodes.iter().enumerate() {
            let f = self.factor(i);
            xs.push(node.x);
            phi.push(node.y * f);
            dphi.push(node.yp * f);
        }
        (xs, phi, dphi)
    }
}

fn log_size(kappa: f64, n: &Node) -> f64 {
    n.log_scale + 0.5 * (kappa * kappa * n.y * n.y + n.yp * n.yp).ln()
}

/// Shoot from `a` and from `b` and join the two at the node where their
/// combined growth is largest. Falls back to the left shot when the two
/// sub-step grids disagree.
fn two_sided(pieces: &[Piece], lambda: f64, kappa: f64, alpha: f64, beta: f64) -> Shot {
    let opts = ShotOptions {
        max_phase: SAMPLE_PHASE,
        min_sub: 2,
        record: true,
    };
    let left = shoot(pieces, lambda, kappa, boundary_data(alpha), opts);
    let (a, b) = (pieces[0].left, pieces[pieces.len() - 1].right);
    let mirrored: Vec<Piece> = pieces
        .iter()
        .rev()
        .map(|p| Piece {
            left: a + b - p.right,
            right: a + b - p.left,
            ..*p
        })
        .collect();
    // y cos β + y' sin β = 0 at b reads y cos(π − β) + (dy/dt) sin(π − β) = 0
    // in t = a + b − x
    let alpha_r = if beta == 0.0 { 0.0 } else { PI - beta };
    let right = shoot(&mirrored, lambda, kappa, boundary_data(alpha_r), opts);
    let n = left.nodes.len();
    if right.nodes.len() != n {
        return left;
    }
    let rl0 = log_size(kappa, &left.nodes[0]);
    let rr0 = log_size(kappa, &right.nodes[0]);
    let m = (0..n)
        .max_by(|&i, &j| {
            let score = |k: usize| {
                log_size(kappa, &left.nodes[k]) - rl0 + log_size(kappa, &right.nodes[n - 1 - k])
                    - rr0
            };
            score(i).total_cmp(&score(j))
        })
        .unwrap();
    if m == n - 1 {
        return left;
    }

    let (lm, rm) = (&left.nodes[m], &right.nodes[n - 1 - m]);
    let dot = kappa * kappa * lm.y * rm.y - lm.yp * rm.yp;
    let norm = kappa * kappa * rm.y * rm.y + rm.yp * rm.yp;
    let ratio = dot / norm;
    if ratio == 0.0 || !ratio.is_finite() {
        return left;
    }
    let sign = ratio.signum();
    let log_c = lm.log_scale - rm.log_scale + ratio.abs().ln();

    let mut nodes: Vec<Node> = left.nodes[..=m].to_vec();
    let mut theta = lm.theta;
    let mut angle = angle_of(kappa, lm.y, lm.yp);
    for i in m + 1..n {
        let r = &right.nodes[n - 1 - i];
        let (y, yp) = (sign * r.y, -sign * r.yp);
        let next = angle_of(kappa, y, yp);
        theta += wrap(next - angle);
        angle = next;
        nodes.push(Node {
            x: left.nodes[i].x,
            y,
            yp,
            log_scale: r.log_scale + log_c,
            theta,
        });
    }
    Shot {
        lambda,
        nodes,
        steps: left.steps,
    }
}
