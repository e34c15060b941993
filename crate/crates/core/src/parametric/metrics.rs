//! Gaps of a reported solution against the true worst case over the full
//! parametric set.

use serde::{Deserialize, Serialize};

use super::report::SolveReport;
use super::{binomial_evaluators, worst_member};
use crate::error::Result;
use crate::expectation::LawCache;
use crate::intake::{ParametricAmbiguitySet, SuccessProbs};
use crate::planning::{Instance, PullForwardPlan};

/// Absolute tolerance for calling a gap zero.
pub const OPTIMALITY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapMetrics {
    /// Largest cost over the set at the reported plan.
    pub worst_value: f64,
    pub worst_probs: SuccessProbs,
    /// Worst value minus the reported objective.
    pub p_gap: f64,
    /// Worst value minus the optimal min-max value.
    pub y_gap: f64,
    pub p_apg: f64,
    pub y_apg: f64,
    pub y_optimal: bool,
    pub p_optimal: bool,
}

impl GapMetrics {
    pub fn optimal(&self) -> bool {
        self.y_optimal && self.p_optimal
    }
}

/// `(max cost, argmax)` over `theta` at `plan`.
pub fn worst_case_value(
    instance: &Instance,
    theta: &ParametricAmbiguitySet,
    plan: &PullForwardPlan,
    cache: &LawCache,
) -> Result<(f64, SuccessProbs)> {
    let net = instance.net_load(plan);
    let evaluators = binomial_evaluators(cache, theta.members(), instance.rollover_cost())?;
    let values: Vec<f64> = evaluators.iter().map(|e| e.cost(&net)).collect();
    let k = worst_member(&values, theta.members());
    Ok((values[k], theta.members()[k].clone()))
}

fn percentage(gap: f64, reference: f64) -> f64 {
    if gap.abs() <= OPTIMALITY_TOLERANCE {
        0.0
    } else if reference == 0.0 {
        f64::INFINITY
    } else {
        gap.abs() / reference.abs() * 100.0
    }
}

/// Gaps of `report` given the optimal value `optimum` of the exact model.
pub fn brute_force_metrics(
    instance: &Instance,
    theta: &ParametricAmbiguitySet,
    report: &SolveReport,
    optimum: f64,
    cache: &LawCache,
) -> Result<GapMetrics> {
    let (worst_value, worst_probs) = worst_case_value(instance, theta, &report.plan, cache)?;
    let p_gap = worst_value - report.objective;
    let y_gap = worst_value - optimum;
    Ok(GapMetrics {
        worst_value,
        worst_probs,
        p_gap,
        y_gap,
        p_apg: percentage(p_gap, worst_value),
        y_apg: percentage(y_gap, optimum),
        y_optimal: y_gap.abs() <= OPTIMALITY_TOLERANCE,
        p_optimal: p_gap.abs() <= OPTIMALITY_TOLERANCE,
    })
}
