use serde::{Deserialize, Serialize};

use super::PiecewiseFn;

/// Monotonicity of the stored piece values. A constant function is reported as
/// `Increasing` (non-decreasing).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    None,
}

impl Monotonicity {
    pub fn is_monotone(self) -> bool {
        self != Monotonicity::None
    }
}

/// Weight-function hypotheses: monotonicity, a positive essential infimum,
/// and the total variation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub h1_monotone: Monotonicity,
    pub h2_essential_inf: f64,
    pub total_variation: f64,
    pub l1_norm: f64,
}

impl HypothesisReport {
    pub fn holds(&self) -> bool {
        self.h1_monotone.is_monotone() && self.h2_essential_inf > 0.0
    }
}

pub fn hypothesis_report(omega: &PiecewiseFn) -> HypothesisReport {
    let v = omega.values();
    let nondecreasing = v.windows(2).all(|w| w[1] >= w[0]);
    let nonincreasing = v.windows(2).all(|w| w[1] <= w[0]);
    let h1_monotone = if nondecreasing {
        Monotonicity::Increasing
    } else if nonincreasing {
        Monotonicity::Decreasing
    } else {
        Monotonicity::None
    };
    HypothesisReport {
        h1_monotone,
        h2_essential_inf: omega.min_value(),
        total_variation: omega.total_variation(),
        l1_norm: omega.l1_norm(),
    }
}
