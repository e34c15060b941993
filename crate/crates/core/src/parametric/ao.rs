//! Reduced-intake approximation: every member's expectation is truncated to
//! the intakes that are likely under at least one member.

use std::sync::Arc;
use std::time::Instant;

use super::elapsed_ms;
use super::report::{Algorithm, SolveReport, StopReason, WorstCase};
use crate::error::{Error, Result};
use crate::expectation::{expected_rollover, BinomialEvaluator, CostEvaluator, LawCache, ScenarioEvaluator, ScenarioSet};
use crate::intake::{reduce_intake_set, ParametricAmbiguitySet};
use crate::master::{MasterStrategy, MinMaxSolver};
use crate::planning::Instance;

pub fn solve_reduced_intake(
    instance: &Instance,
    theta: &ParametricAmbiguitySet,
    beta: f64,
    strategy: MasterStrategy,
) -> Result<SolveReport> {
    let clock = Instant::now();
    if theta.is_empty() {
        return Err(Error::EmptyAmbiguitySet);
    }
    let reduced = reduce_intake_set(theta, instance.intake_max(), beta)?;
    let scenarios = Arc::new(ScenarioSet::from_reduced(&reduced));
    let cache = LawCache::new(instance.intake_max());
    let mut evaluators: Vec<Arc<dyn CostEvaluator>> = Vec::with_capacity(theta.len());
    for p in theta.members() {
        let law = cache.get(p)?;
        evaluators.push(Arc::new(ScenarioEvaluator::truncated_binomial(
            Arc::clone(&scenarios),
            &law,
            instance.rollover_cost(),
        )));
    }
    let solution = MinMaxSolver::new(instance, strategy)?.solve(&evaluators)?;
    let worst = theta.members()[solution.argmax].clone();
    let law = cache.get(&worst)?;
    let exact = BinomialEvaluator::new(Arc::clone(&law), instance.rollover_cost());
    Ok(SolveReport {
        algorithm: Algorithm::ReducedIntake,
        plan: solution.plan,
        worst_case: WorstCase::Parameter(worst),
        objective: exact.cost(&solution.net),
        iterations: 1,
        trace: Vec::new(),
        pmf_tables: cache.constructions(),
        evaluator_calls: solution.evaluations + 1,
        converged: true,
        stop_reason: StopReason::Solved,
        worst_case_rollover: expected_rollover(&solution.net, &law),
        surrogate_objective: Some(solution.value),
        wall_time_ms: elapsed_ms(clock),
    })
}
