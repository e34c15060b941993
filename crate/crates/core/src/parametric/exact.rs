use std::time::Instant;

use super::report::{Algorithm, SolveReport, StopReason, WorstCase};
use super::{binomial_evaluators, elapsed_ms, worst_member};
use crate::error::{Error, Result};
use crate::expectation::{expected_rollover, LawCache};
use crate::intake::{ParametricAmbiguitySet, SuccessProbs};
use crate::master::{MasterStrategy, MinMaxSolver};
use crate::planning::{Instance, NetLoad};

/// Worst member of a candidate list at a fixed net load.
#[derive(Debug, Clone, PartialEq)]
pub struct Separation {
    pub probs: SuccessProbs,
    pub cost: f64,
    pub evaluations: usize,
}

/// Evaluates every candidate at `net` and returns the costliest one.
pub fn distribution_separation(
    instance: &Instance,
    net: &NetLoad,
    candidates: &[SuccessProbs],
    cache: &LawCache,
) -> Result<Separation> {
    if candidates.is_empty() {
        return Err(Error::EmptyAmbiguitySet);
    }
    let evaluators = binomial_evaluators(cache, candidates, instance.rollover_cost())?;
    let values: Vec<f64> = evaluators.iter().map(|e| e.cost(net)).collect();
    let k = worst_member(&values, candidates);
    Ok(Separation { probs: candidates[k].clone(), cost: values[k], evaluations: values.len() })
}

/// Solves the exact model with one constraint per member of `theta`.
pub fn solve_exact(instance: &Instance, theta: &ParametricAmbiguitySet, strategy: MasterStrategy) -> Result<SolveReport> {
    let start = Instant::now();
    if theta.is_empty() {
        return Err(Error::EmptyAmbiguitySet);
    }
    let cache = LawCache::new(instance.intake_max());
    let evaluators = binomial_evaluators(&cache, theta.members(), instance.rollover_cost())?;
    let solution = MinMaxSolver::new(instance, strategy)?.solve(&evaluators)?;
    let worst = theta.members()[solution.argmax].clone();
    let law = cache.get(&worst)?;
    Ok(SolveReport {
        algorithm: Algorithm::Exact,
        plan: solution.plan,
        worst_case: WorstCase::Parameter(worst),
        objective: solution.value,
        iterations: 1,
        trace: Vec::new(),
        pmf_tables: cache.constructions(),
        evaluator_calls: solution.evaluations,
        converged: true,
        stop_reason: StopReason::Solved,
        worst_case_rollover: expected_rollover(&solution.net, &law),
        surrogate_objective: None,
        wall_time_ms: elapsed_ms(start),
    })
}
