//! Robust baseline. The worst realisation for any plan is the largest
//! intake, so the robust model is the deterministic one at that intake.

use std::sync::Arc;
use std::time::Instant;

use super::elapsed_ms;
use super::report::{Algorithm, SolveReport, StopReason, WorstCase};
use crate::error::Result;
use crate::expectation::{CostEvaluator, ScenarioEvaluator, ScenarioSet};
use crate::intake::IntakeSpace;
use crate::master::{MasterStrategy, MinMaxSolver};
use crate::planning::Instance;

pub fn solve_robust(instance: &Instance, strategy: MasterStrategy) -> Result<SolveReport> {
    let clock = Instant::now();
    let space = IntakeSpace::new(instance.intake_max())?;
    let top = space.index_of(instance.intake_max())?;
    let scenarios = Arc::new(ScenarioSet::subset(space, vec![top]));
    let evaluator: Arc<dyn CostEvaluator> = Arc::new(ScenarioEvaluator::new(
        scenarios,
        vec![1.0],
        instance.rollover_cost(),
        "intake max".to_string(),
    )?);
    let solution = MinMaxSolver::new(instance, strategy)?.solve(&[evaluator])?;
    let trajectory = instance.rollover_trajectory(&solution.plan, instance.intake_max())?;
    Ok(SolveReport {
        algorithm: Algorithm::Robust,
        plan: solution.plan,
        worst_case: WorstCase::Intake(instance.intake_max().to_vec()),
        objective: solution.value,
        iterations: 1,
        trace: Vec::new(),
        pmf_tables: 0,
        evaluator_calls: solution.evaluations,
        converged: true,
        stop_reason: StopReason::Solved,
        worst_case_rollover: trajectory.rollover,
        surrogate_objective: None,
        wall_time_ms: elapsed_ms(clock),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planning::{DayPair, PullForwardPlan};

    #[test]
    fn worked_example() {
        let inst = Instance::with_unit_costs(1, vec![30, 10], vec![5, 20], vec![20, 20]).unwrap();
        let report = solve_robust(&inst, MasterStrategy::ExactSearch).unwrap();
        assert_eq!(report.plan.to_string(), "y[2,1]=5");
        assert_eq!(report.objective, 25.0);
        // Independent scan of the two-day recursion.
        let best = (0..=20)
            .map(|y| {
                let plan = PullForwardPlan::from_entries([(DayPair::new(2, 1), y)]);
                inst.rollover_trajectory(&plan, &[20, 20]).unwrap().total_cost
            })
            .fold(f64::INFINITY, f64::min);
        assert_eq!(best, 25.0);
    }

    #[test]
    fn zero_intake_is_the_deterministic_plan() {
        let inst = Instance::with_unit_costs(1, vec![10, 10], vec![4, 12], vec![0, 0]).unwrap();
        let report = solve_robust(&inst, MasterStrategy::ExactSearch).unwrap();
        assert_eq!(report.objective, 0.0);
        assert_eq!(report.plan.to_string(), "y[2,1]=2");
    }
}
