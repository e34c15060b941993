//! Brute force: every feasible net load against every member.

use std::time::Instant;

use super::report::{Algorithm, SolveReport, StopReason, WorstCase};
use super::{binomial_evaluators, elapsed_ms, worst_member};
use crate::error::{Error, Result};
use crate::expectation::{expected_rollover, LawCache};
use crate::intake::ParametricAmbiguitySet;
use crate::master::{PlanLattice, DEFAULT_LATTICE_CAP};
use crate::planning::Instance;

/// Exhaustive min-max; meant for small instances and as a test reference.
pub fn solve_brute_force(instance: &Instance, theta: &ParametricAmbiguitySet) -> Result<SolveReport> {
    let clock = Instant::now();
    if theta.is_empty() {
        return Err(Error::EmptyAmbiguitySet);
    }
    let lattice = PlanLattice::new(instance, DEFAULT_LATTICE_CAP)?;
    let cache = LawCache::new(instance.intake_max());
    let evaluators = binomial_evaluators(&cache, theta.members(), instance.rollover_cost())?;
    let mut best: Option<(usize, usize, f64)> = None;
    for candidate in 0..lattice.len() {
        let net = lattice.net_load(candidate);
        let values: Vec<f64> = evaluators.iter().map(|e| e.cost(&net)).collect();
        let k = worst_member(&values, theta.members());
        // Strict improvement keeps the lexicographically first plan on ties.
        if best.is_none_or(|(_, _, v)| values[k] < v - 1e-9 * v.abs().max(1.0)) {
            best = Some((candidate, k, values[k]));
        }
    }
    let (candidate, k, value) = best.expect("lattice has at least one candidate");
    let worst = theta.members()[k].clone();
    let law = cache.get(&worst)?;
    Ok(SolveReport {
        algorithm: Algorithm::BruteForce,
        plan: lattice.plan(candidate),
        worst_case: WorstCase::Parameter(worst),
        objective: value,
        iterations: 1,
        trace: Vec::new(),
        pmf_tables: cache.constructions(),
        evaluator_calls: lattice.len() * evaluators.len(),
        converged: true,
        stop_reason: StopReason::Solved,
        worst_case_rollover: expected_rollover(&lattice.net_load(candidate), &law),
        surrogate_objective: None,
        wall_time_ms: elapsed_ms(clock),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intake::build_confidence_set;
    use crate::master::MasterStrategy;
    use crate::parametric::solve_exact;

    #[test]
    fn agrees_with_the_exact_solver() {
        let inst = Instance::new(2, vec![9, 5, 7, 6], vec![4, 8, 5, 9], vec![1.0, 1.5, 1.0, 2.0], vec![3, 2, 2, 3]).unwrap();
        let theta = build_confidence_set(&[0.5, 0.4, 0.6, 0.5], 10, &[3, 2, 2, 3], 0.05, 5).unwrap();
        let oracle = solve_brute_force(&inst, &theta).unwrap();
        let exact = solve_exact(&inst, &theta, MasterStrategy::ExactSearch).unwrap();
        assert!((oracle.objective - exact.objective).abs() < 1e-9);
        assert_eq!(oracle.plan, exact.plan);
    }
}
