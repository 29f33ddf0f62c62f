//! JSON problem files.
//!
//! ```json
//! {
//!   "interval": [0.0, 1.0],
//!   "alpha": 0.0,
//!   "beta": 0.0,
//!   "p":     { "breakpoints": [0.0, 1.0], "values": [1.0] },
//!   "q":     { "breakpoints": [0.0, 0.5, 1.0], "values": [20.0, -5.0] },
//!   "omega": { "breakpoints": [0.0, 1.0], "values": [1.0] }
//! }
//! ```
//!
//! Floats are written in shortest round-trip form and parsed with correct
//! rounding, so a serialize/parse cycle reproduces every value bit for bit.

use serde::{Deserialize, Serialize};

use super::{PiecewiseFn, SLProblem};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PiecewiseSpec {
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub interval: [f64; 2],
    pub alpha: f64,
    pub beta: f64,
    pub p: PiecewiseSpec,
    pub q: PiecewiseSpec,
    pub omega: PiecewiseSpec,
}

impl From<&PiecewiseFn> for PiecewiseSpec {
    fn from(f: &PiecewiseFn) -> Self {
        Self {
            breakpoints: f.breakpoints().to_vec(),
            values: f.values().to_vec(),
        }
    }
}

impl PiecewiseSpec {
    pub fn build(&self, field: &str) -> Result<PiecewiseFn> {
        PiecewiseFn::new(self.breakpoints.clone(), self.values.clone())
            .map_err(|e| Error::InvalidProblem(format!("field `{field}`: {e}")))
    }
}

impl From<&SLProblem> for ProblemFile {
    fn from(prob: &SLProblem) -> Self {
        Self {
            interval: [prob.a(), prob.b()],
            alpha: prob.alpha(),
            beta: prob.beta(),
            p: prob.p().into(),
            q: prob.q().into(),
            omega: prob.omega().into(),
        }
    }
}

impl ProblemFile {
    pub fn build(&self) -> Result<SLProblem> {
        let [a, b] = self.interval;
        if !(a < b) {
            return Err(Error::InvalidProblem(format!(
                "field `interval`: need a < b, got [{a}, {b}]"
            )));
        }
        let p = self.p.build("p")?;
        let q = self.q.build("q")?;
        let omega = self.omega.build("omega")?;
        for (name, f) in [("p", &p), ("q", &q), ("omega", &omega)] {
            if f.start() != a || f.end() != b {
                return Err(Error::InvalidProblem(format!(
                    "field `{name}`: breakpoints span [{}, {}] but interval is [{a}, {b}]",
                    f.start(),
                    f.end()
                )));
            }
        }
        SLProblem::new(p, q, omega, self.alpha, self.beta)
    }
}

impl SLProblem {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ProblemFile = serde_json::from_str(text)?;
        file.build()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ProblemFile::from(self)).expect("problem serializes")
    }
}

impl PiecewiseFn {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: PiecewiseSpec = serde_json::from_str(text)?;
        spec.build("function")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&PiecewiseSpec::from(self)).expect("function serializes")
    }
}
