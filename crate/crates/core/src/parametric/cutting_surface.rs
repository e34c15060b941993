//! Cutting-surface loop: solve the master over a growing pool of
//! parameters, separate the worst parameter at the master's plan, and stop
//! once separation adds nothing new.

use std::sync::Arc;
use std::time::Instant;

use super::exact::distribution_separation;
use super::report::{Algorithm, IterationRecord, SolveReport, StopReason, WorstCase};
use super::{binomial_evaluators, elapsed_ms};
use crate::error::{Error, Result};
use crate::expectation::{expected_rollover, BinomialEvaluator, CostEvaluator, LawCache};
use crate::intake::{build_extreme_set, ParametricAmbiguitySet, SuccessProbs};
use crate::master::{MasterStrategy, MinMaxSolver};
use crate::planning::{Instance, NetLoad, PullForwardPlan};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CuttingSurfaceOptions {
    pub epsilon: f64,
    pub max_iterations: usize,
    pub strategy: MasterStrategy,
}

impl Default for CuttingSurfaceOptions {
    fn default() -> Self {
        Self { epsilon: 0.01, max_iterations: 10, strategy: MasterStrategy::ExactSearch }
    }
}

/// Separation over the extreme points of `theta`, starting from the estimate.
pub fn solve_cs(instance: &Instance, theta: &ParametricAmbiguitySet, options: &CuttingSurfaceOptions) -> Result<SolveReport> {
    let extreme = build_extreme_set(theta);
    let start = initial_parameter(theta)?;
    let mut report = solve_cutting_surface(instance, extreme.members(), start, options)?;
    report.algorithm = Algorithm::CuttingSurface;
    Ok(report)
}

/// Separation over the whole of `theta`, starting from the estimate.
pub fn solve_cs_full(
    instance: &Instance,
    theta: &ParametricAmbiguitySet,
    options: &CuttingSurfaceOptions,
) -> Result<SolveReport> {
    let start = initial_parameter(theta)?;
    let mut report = solve_cutting_surface(instance, theta.members(), start, options)?;
    report.algorithm = Algorithm::CuttingSurfaceFull;
    Ok(report)
}

/// The estimate the set was built around, or its first member when the set
/// is explicit.
fn initial_parameter(theta: &ParametricAmbiguitySet) -> Result<SuccessProbs> {
    match theta.spec() {
        Some(spec) => Ok(SuccessProbs(spec.estimate.clone())),
        None => theta.members().first().cloned().ok_or(Error::EmptyAmbiguitySet),
    }
}

#[derive(Clone)]
struct Incumbent {
    plan: PullForwardPlan,
    net: NetLoad,
    probs: SuccessProbs,
    cost: f64,
}

pub fn solve_cutting_surface(
    instance: &Instance,
    separation_set: &[SuccessProbs],
    initial: SuccessProbs,
    options: &CuttingSurfaceOptions,
) -> Result<SolveReport> {
    let clock = Instant::now();
    if separation_set.is_empty() {
        return Err(Error::EmptyAmbiguitySet);
    }
    if !(options.epsilon > 0.0) || options.max_iterations == 0 {
        return Err(Error::Domain(format!(
            "cutting surface needs epsilon > 0 and at least one iteration, got {} and {}",
            options.epsilon, options.max_iterations
        )));
    }
    let cache = LawCache::new(instance.intake_max());
    let solver = MinMaxSolver::new(instance, options.strategy)?;
    let mut pool = vec![initial];
    let mut evaluators: Vec<Arc<dyn CostEvaluator>> = binomial_evaluators(&cache, &pool, instance.rollover_cost())?;
    let mut trace = Vec::new();
    let mut calls = 0;
    let mut best: Option<Incumbent> = None;
    let mut stop = StopReason::IterationLimit;
    let mut last = None;

    for iteration in 1..=options.max_iterations {
        let master = solver.solve(&evaluators)?;
        calls += master.evaluations;
        let sep = distribution_separation(instance, &master.net, separation_set, &cache)?;
        calls += sep.evaluations;
        trace.push(IterationRecord {
            iteration,
            plan: master.plan.clone(),
            master_value: master.value,
            separation_value: sep.cost,
            separated: sep.probs.to_string(),
            pool_size: pool.len(),
        });
        log::debug!("iteration {iteration}: {} t={} C={} at {}", master.plan, master.value, sep.cost, sep.probs);
        let current = Incumbent { plan: master.plan, net: master.net, probs: sep.probs.clone(), cost: sep.cost };
        if best.as_ref().is_none_or(|b| current.cost < b.cost) {
            best = Some(current.clone());
        }
        if pool.contains(&sep.probs) {
            // The separated parameter is already priced into the master, so
            // its cost cannot exceed the master value.
            let slack = 1e-9 * master.value.abs().max(1.0);
            if sep.cost > master.value + slack {
                return Err(Error::Solver(format!(
                    "repeated parameter {} costs {} above master value {}",
                    sep.probs, sep.cost, master.value
                )));
            }
            stop = StopReason::RepeatedParameter;
            last = Some(current);
            break;
        }
        if sep.cost <= master.value + options.epsilon / 2.0 {
            stop = StopReason::WithinTolerance;
            last = Some(current);
            break;
        }
        let law = cache.get(&sep.probs)?;
        evaluators.push(Arc::new(BinomialEvaluator::new(law, instance.rollover_cost())));
        pool.push(sep.probs);
    }

    let converged = last.is_some();
    let chosen = match last {
        Some(found) => found,
        None => best.expect("at least one iteration ran"),
    };
    let law = cache.get(&chosen.probs)?;
    Ok(SolveReport {
        algorithm: Algorithm::CuttingSurface,
        plan: chosen.plan,
        worst_case: WorstCase::Parameter(chosen.probs),
        objective: chosen.cost,
        iterations: trace.len(),
        trace,
        pmf_tables: cache.constructions(),
        evaluator_calls: calls,
        converged,
        stop_reason: stop,
        worst_case_rollover: expected_rollover(&chosen.net, &law),
        surrogate_objective: None,
        wall_time_ms: elapsed_ms(clock),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intake::build_confidence_set;

    fn worked() -> (Instance, ParametricAmbiguitySet) {
        let inst = Instance::with_unit_costs(1, vec![30, 10], vec![5, 20], vec![20, 20]).unwrap();
        let theta = build_confidence_set(&[0.75, 0.75], 10, &[20, 20], 0.005, 100).unwrap();
        (inst, theta)
    }

    fn pulled(report: &SolveReport) -> Vec<String> {
        report.trace.iter().map(|r| r.plan.to_string()).collect()
    }

    #[test]
    fn extreme_point_separation_on_the_worked_example() {
        let (inst, theta) = worked();
        let report = solve_cs(&inst, &theta, &CuttingSurfaceOptions::default()).unwrap();
        assert_eq!(pulled(&report), ["y[2,1]=10", "y[2,1]=8", "y[2,1]=9"]);
        assert_eq!(report.plan.to_string(), "y[2,1]=9");
        assert_eq!(report.worst_case, WorstCase::Parameter(SuccessProbs(vec![0.84, 0.79])));
        assert!((report.objective - 19.069_420_203).abs() < 1e-6, "{}", report.objective);
        assert_eq!(report.stop_reason, StopReason::RepeatedParameter);
        assert_eq!(report.pmf_tables, 3);
        assert!(report.converged);
    }

    #[test]
    fn full_separation_on_the_worked_example() {
        let (inst, theta) = worked();
        let report = solve_cs_full(&inst, &theta, &CuttingSurfaceOptions::default()).unwrap();
        assert_eq!(report.iterations, 4);
        assert_eq!(report.plan.to_string(), "y[2,1]=9");
        assert_eq!(report.worst_case, WorstCase::Parameter(SuccessProbs(vec![0.82, 0.82])));
        assert_eq!(report.stop_reason, StopReason::RepeatedParameter);
        assert!((report.objective - 19.196_225_566_902_672).abs() < 1e-9);
    }

    #[test]
    fn singleton_set_takes_one_iteration() {
        let (inst, _) = worked();
        let p = SuccessProbs(vec![0.6, 0.7]);
        let report = solve_cutting_surface(&inst, std::slice::from_ref(&p), p.clone(), &CuttingSurfaceOptions::default()).unwrap();
        assert_eq!(report.iterations, 1);
        assert_eq!(report.stop_reason, StopReason::RepeatedParameter);
    }

    #[test]
    fn iteration_limit_reports_best_incumbent() {
        let (inst, theta) = worked();
        let options = CuttingSurfaceOptions { max_iterations: 1, ..Default::default() };
        let report = solve_cs_full(&inst, &theta, &options).unwrap();
        assert!(!report.converged);
        assert_eq!(report.stop_reason, StopReason::IterationLimit);
        assert_eq!(report.objective, report.trace[0].separation_value);
    }

    #[test]
    fn rejects_bad_options() {
        let (inst, theta) = worked();
        let options = CuttingSurfaceOptions { epsilon: 0.0, ..Default::default() };
        assert!(solve_cs(&inst, &theta, &options).is_err());
    }
}
