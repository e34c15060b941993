//! The master problem: choose the plan minimising the largest expected cost
//! over a finite collection of evaluators.
//!
//! Two strategies are available. [`MasterStrategy::ExactSearch`] (the
//! default) searches the lattice of feasible plans with convexity cuts.
//! [`MasterStrategy::Mip`] assembles the epigraph model with explicit
//! rollover variables and hands it to the branch-and-bound solver; it is
//! meant for small instances and cross-checks.

mod lattice;
mod mip;
mod search;

pub use lattice::{PlanLattice, DEFAULT_LATTICE_CAP};
pub use mip::{epigraph_program, EpigraphProgram, DEFAULT_ROLLOVER_VARIABLE_CAP};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expectation::CostEvaluator;
use crate::planning::{Instance, NetLoad, PullForwardPlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MasterStrategy {
    #[default]
    ExactSearch,
    Mip,
}

#[derive(Debug, Clone)]
pub struct MasterSolution {
    pub plan: PullForwardPlan,
    pub net: NetLoad,
    /// Largest expected cost over the evaluators at `plan`.
    pub value: f64,
    /// Index of the evaluator attaining `value`.
    pub argmax: usize,
    /// Every evaluator's cost at `plan`.
    pub values: Vec<f64>,
    /// Cost evaluations spent, including the final full evaluation.
    pub evaluations: usize,
}

impl MasterSolution {
    fn at(lattice: &PlanLattice, candidate: usize, evaluators: &[Arc<dyn CostEvaluator>]) -> Self {
        Self::for_plan(lattice.plan(candidate), lattice.net_load(candidate), evaluators)
    }

    fn for_plan(plan: PullForwardPlan, net: NetLoad, evaluators: &[Arc<dyn CostEvaluator>]) -> Self {
        let values: Vec<f64> = evaluators.iter().map(|e| e.cost(&net)).collect();
        let argmax = argmax_index(&values, evaluators);
        Self { plan, net, value: values[argmax], argmax, evaluations: values.len(), values }
    }
}

/// Position of the largest value; near-ties go to the lexicographically
/// smallest success-probability vector, then to the lowest index.
pub fn argmax_index(values: &[f64], evaluators: &[Arc<dyn CostEvaluator>]) -> usize {
    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let slack = 1e-12 * top.abs().max(1.0);
    let tied = (0..values.len()).filter(|&k| values[k] >= top - slack);
    tied.min_by(|&a, &b| match (evaluators[a].success_probs(), evaluators[b].success_probs()) {
        (Some(pa), Some(pb)) => pa.cmp(pb).then(a.cmp(&b)),
        _ => a.cmp(&b),
    })
    .expect("at least one evaluator")
}

/// A master problem bound to one instance, reusable across calls.
#[derive(Debug, Clone)]
pub struct MinMaxSolver {
    instance: Instance,
    strategy: MasterStrategy,
    lattice: Option<PlanLattice>,
}

impl MinMaxSolver {
    pub fn new(instance: &Instance, strategy: MasterStrategy) -> Result<Self> {
        let lattice = match strategy {
            MasterStrategy::ExactSearch => Some(PlanLattice::new(instance, DEFAULT_LATTICE_CAP)?),
            MasterStrategy::Mip => None,
        };
        Ok(Self { instance: instance.clone(), strategy, lattice })
    }

    pub fn strategy(&self) -> MasterStrategy {
        self.strategy
    }

    pub fn lattice(&self) -> Option<&PlanLattice> {
        self.lattice.as_ref()
    }

    pub fn solve(&self, evaluators: &[Arc<dyn CostEvaluator>]) -> Result<MasterSolution> {
        if evaluators.is_empty() {
            return Err(Error::EmptyAmbiguitySet);
        }
        match (&self.lattice, self.strategy) {
            (Some(lattice), MasterStrategy::ExactSearch) => Ok(search::exact_search(lattice, evaluators)),
            _ => {
                let model = epigraph_program(&self.instance, evaluators, DEFAULT_ROLLOVER_VARIABLE_CAP)?;
                let plan = model.solve()?;
                let net = self.instance.net_load(&plan);
                Ok(MasterSolution::for_plan(plan, net, evaluators))
            }
        }
    }
}

pub fn solve_min_max(
    instance: &Instance,
    evaluators: &[Arc<dyn CostEvaluator>],
    strategy: MasterStrategy,
) -> Result<MasterSolution> {
    MinMaxSolver::new(instance, strategy)?.solve(evaluators)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expectation::{BinomialEvaluator, LawCache};
    use crate::intake::{build_confidence_set, SuccessProbs};

    fn worked() -> Instance {
        Instance::with_unit_costs(1, vec![30, 10], vec![5, 20], vec![20, 20]).unwrap()
    }

    fn evaluators(inst: &Instance, members: &[SuccessProbs]) -> Vec<Arc<dyn CostEvaluator>> {
        let cache = LawCache::new(inst.intake_max());
        members
            .iter()
            .map(|p| {
                Arc::new(BinomialEvaluator::new(cache.get(p).unwrap(), inst.rollover_cost())) as Arc<dyn CostEvaluator>
            })
            .collect()
    }

    /// Direct scan of all 21 plans.
    fn scan(inst: &Instance, evals: &[Arc<dyn CostEvaluator>]) -> (u32, f64) {
        let lattice = PlanLattice::new(inst, DEFAULT_LATTICE_CAP).unwrap();
        let mut best = (0, f64::INFINITY);
        for c in 0..lattice.len() {
            let net = lattice.net_load(c);
            let worst = evals.iter().map(|e| e.cost(&net)).fold(f64::NEG_INFINITY, f64::max);
            if worst < best.1 - 1e-12 {
                best = (c as u32, worst);
            }
        }
        best
    }

    #[test]
    fn estimate_alone_pulls_ten() {
        let inst = worked();
        let evals = evaluators(&inst, &[SuccessProbs(vec![0.75, 0.75])]);
        let sol = solve_min_max(&inst, &evals, MasterStrategy::ExactSearch).unwrap();
        assert_eq!(sol.plan.to_string(), "y[2,1]=10");
        assert_eq!(scan(&inst, &evals).0, 10);
    }

    #[test]
    fn full_confidence_set() {
        let inst = worked();
        let theta = build_confidence_set(&[0.75, 0.75], 10, &[20, 20], 0.005, 100).unwrap();
        let evals = evaluators(&inst, theta.members());
        let sol = solve_min_max(&inst, &evals, MasterStrategy::ExactSearch).unwrap();
        assert_eq!(sol.plan.to_string(), "y[2,1]=9");
        assert_eq!(theta.members()[sol.argmax], SuccessProbs(vec![0.82, 0.82]));
        assert!((sol.value - 19.196_225_566_902_672).abs() < 1e-9);
        let (y, v) = scan(&inst, &evals);
        assert_eq!(y, 9);
        assert!((v - sol.value).abs() < 1e-12);
    }

    #[test]
    fn no_spare_capacity() {
        let inst = Instance::with_unit_costs(1, vec![5, 5], vec![5, 9], vec![3, 3]).unwrap();
        let evals = evaluators(&inst, &[SuccessProbs(vec![0.5, 0.5])]);
        let sol = solve_min_max(&inst, &evals, MasterStrategy::ExactSearch).unwrap();
        assert!(sol.plan.is_zero());
    }

    #[test]
    fn strategies_agree_on_a_small_instance() {
        let inst = Instance::new(2, vec![6, 4, 5], vec![2, 6, 7], vec![1.0, 2.0, 1.5], vec![3, 2, 3]).unwrap();
        let members = [SuccessProbs(vec![0.4, 0.7, 0.5]), SuccessProbs(vec![0.8, 0.3, 0.6])];
        let evals = evaluators(&inst, &members);
        let exact = solve_min_max(&inst, &evals, MasterStrategy::ExactSearch).unwrap();
        let mip = solve_min_max(&inst, &evals, MasterStrategy::Mip).unwrap();
        assert!((exact.value - mip.value).abs() < 1e-6, "{} vs {}", exact.value, mip.value);
    }
}
