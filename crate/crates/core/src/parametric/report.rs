use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::intake::SuccessProbs;
use crate::planning::PullForwardPlan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "P")]
    Exact,
    #[serde(rename = "CS")]
    CuttingSurface,
    #[serde(rename = "CS_opt")]
    CuttingSurfaceFull,
    #[serde(rename = "AO")]
    ReducedIntake,
    #[serde(rename = "NP")]
    Nonparametric,
    #[serde(rename = "RO")]
    Robust,
    #[serde(rename = "benders")]
    Benders,
    #[serde(rename = "oracle")]
    BruteForce,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::Exact,
        Algorithm::CuttingSurface,
        Algorithm::CuttingSurfaceFull,
        Algorithm::ReducedIntake,
        Algorithm::Nonparametric,
        Algorithm::Robust,
        Algorithm::Benders,
        Algorithm::BruteForce,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Exact => "P",
            Algorithm::CuttingSurface => "CS",
            Algorithm::CuttingSurfaceFull => "CS_opt",
            Algorithm::ReducedIntake => "AO",
            Algorithm::Nonparametric => "NP",
            Algorithm::Robust => "RO",
            Algorithm::Benders => "benders",
            Algorithm::BruteForce => "oracle",
        }
    }

    /// Algorithms whose reported worst case is a member of the parametric set.
    pub fn is_parametric(self) -> bool {
        !matches!(self, Algorithm::Nonparametric | Algorithm::Robust)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Domain(format!("unknown algorithm {s:?}")))
    }
}

/// What the algorithm reports as the worst case for its plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum WorstCase {
    Parameter(SuccessProbs),
    /// Explicit distribution, identified by a content hash.
    Distribution { hash: String },
    Intake(Vec<u32>),
}

impl fmt::Display for WorstCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WorstCase::Parameter(p) => write!(f, "{p}"),
            WorstCase::Distribution { hash } => write!(f, "dist:{hash}"),
            WorstCase::Intake(i) => {
                let parts: Vec<String> = i.iter().map(u32::to_string).collect();
                write!(f, "intake:({})", parts.join(","))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    /// Single-shot solve; no iteration.
    Solved,
    /// Separated cost within half the tolerance of the master value.
    WithinTolerance,
    /// Separation returned a parameter already in the pool.
    RepeatedParameter,
    /// Upper and lower bounds met.
    BoundsClosed,
    /// The master proposed a plan that was already evaluated.
    RepeatedPlan,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub plan: PullForwardPlan,
    /// Master value (`t^k`, or the lower bound for decomposition).
    pub master_value: f64,
    /// Separated cost (`C_{p^k}`, or the upper bound for decomposition).
    pub separation_value: f64,
    pub separated: String,
    pub pool_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub algorithm: Algorithm,
    pub plan: PullForwardPlan,
    pub worst_case: WorstCase,
    pub objective: f64,
    pub iterations: usize,
    pub trace: Vec<IterationRecord>,
    /// PMF-table sets constructed.
    pub pmf_tables: usize,
    pub evaluator_calls: usize,
    pub converged: bool,
    pub stop_reason: StopReason,
    /// `E[R_τ]` under the reported worst case.
    pub worst_case_rollover: Vec<f64>,
    /// Objective of the approximate model before exact re-evaluation.
    pub surrogate_objective: Option<f64>,
    pub wall_time_ms: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.as_str().parse::<Algorithm>().unwrap(), a);
        }
        assert!("nope".parse::<Algorithm>().is_err());
    }
}
