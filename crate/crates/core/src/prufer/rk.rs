//! Dormand–Prince 5(4) with error control per unit length.

use std::f64::consts::TAU;

use crate::error::{Error, Result};

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order weights minus the embedded fourth-order ones
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const MAX_STEPS: usize = 50_000_000;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Stepper {
    pub tol: f64,
    /// Step size carried over between calls.
    pub h: f64,
    pub steps: usize,
    /// When set, component 0 is an angle that only enters the right-hand side
    /// through its sine and cosine. It is kept in `[0, 2π)` and the removed
    /// full turns are counted in `turns`.
    pub periodic: bool,
    pub turns: i64,
}

impl Stepper {
    pub fn new(tol: f64, h: f64) -> Self {
        Self {
            tol,
            h,
            steps: 0,
            periodic: false,
            turns: 0,
        }
    }

    pub fn periodic(tol: f64, h: f64) -> Self {
        Self {
            periodic: true,
            ..Self::new(tol, h)
        }
    }

    /// Full value of a reduced angle.
    pub fn unreduced(&self, angle: f64) -> f64 {
        angle + self.turns as f64 * TAU
    }

    /// Advance `y` from `x0` to exactly `x1` for the autonomous-in-piece
    /// system `y' = f(y)`. Local error estimates are kept below `tol · h`.
    pub fn advance<const N: usize>(
        &mut self,
        f: &impl Fn(&[f64; N]) -> [f64; N],
        x0: f64,
        x1: f64,
        y: &mut [f64; N],
    ) -> Result<()> {
        let mut x = x0;
        let mut k1 = f(y);
        while x < x1 {
            let mut h = self.h.min(x1 - x);
            let last = x + h >= x1 || (x1 - (x + h)) < 1e-12 * (x1 - x0);
            if last {
                h = x1 - x;
            }
            let stage = |coef: &[(f64, &[f64; N])]| {
                let mut out = *y;
                for (c, k) in coef {
                    for i in 0..N {
                        out[i] += h * c * k[i];
                    }
                }
                out
            };
            let k2 = f(&stage(&[(A21, &k1)]));
            let k3 = f(&stage(&[(A31, &k1), (A32, &k2)]));
            let k4 = f(&stage(&[(A41, &k1), (A42, &k2), (A43, &k3)]));
            let k5 = f(&stage(&[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
            let k6 = f(&stage(&[
                (A61, &k1),
                (A62, &k2),
                (A63, &k3),
                (A64, &k4),
                (A65, &k5),
            ]));
            let ynew = stage(&[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
            let k7 = f(&ynew);
            let mut err: f64 = 0.0;
            for i in 0..N {
                let e = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                err = err.max(e.abs());
            }
            let ratio = err / (self.tol * h);
            self.steps += 1;
            if self.steps > MAX_STEPS {
                return Err(Error::Degenerate(format!(
                    "Runge-Kutta step limit exceeded near x = {x}"
                )));
            }
            if ratio <= 1.0 || h < 1e-14 * (1.0 + x.abs()) {
                *y = ynew;
                if self.periodic && !(0.0..TAU).contains(&y[0]) {
                    let k = (y[0] / TAU).floor();
                    y[0] -= k * TAU;
                    self.turns += k as i64;
                }
                k1 = k7;
                x = if last { x1 } else { x + h };
                let grow = if ratio == 0.0 {
                    5.0
                } else {
                    (0.9 * ratio.powf(-0.25)).clamp(0.2, 5.0)
                };
                if !last || grow < 1.0 {
                    self.h = h * grow;
                }
            } else {
                self.h = h * (0.9 * ratio.powf(-0.25)).max(0.1);
            }
        }
        Ok(())
    }
}
