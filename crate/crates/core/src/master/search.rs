//! Exact min-max search over the plan lattice.
//!
//! Every evaluator is convex in the net load, so a cost and subgradient at
//! one candidate give an affine lower bound ("cut") on that evaluator, and
//! hence on the maximum, at every other candidate. The search keeps the best
//! cut value per candidate, always evaluates the unevaluated candidate with
//! the smallest bound, and stops once every remaining bound exceeds the
//! incumbent. Candidates are proven worse as soon as one evaluator exceeds
//! the incumbent, so most evaluations touch a single distribution.

use std::sync::Arc;

use super::lattice::PlanLattice;
use super::MasterSolution;
use crate::expectation::CostEvaluator;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Status {
    Open,
    /// Some evaluator exceeded the incumbent at evaluation time.
    Worse,
    Exact(f64),
}

pub(crate) fn tie_tolerance(value: f64) -> f64 {
    1e-9 * value.abs().max(1.0)
}

struct Search<'a> {
    lattice: &'a PlanLattice,
    evaluators: &'a [Arc<dyn CostEvaluator>],
    bound: Vec<f64>,
    status: Vec<Status>,
    /// Evaluator indices, most recently useful first.
    priority: Vec<usize>,
    incumbent: f64,
    evaluations: usize,
}

impl Search<'_> {
    fn promote(&mut self, evaluator: usize) {
        if let Some(pos) = self.priority.iter().position(|&e| e == evaluator) {
            self.priority.remove(pos);
            self.priority.insert(0, evaluator);
        }
    }

    fn add_cut(&mut self, at: usize, value: f64, slope: &[f64]) {
        let origin = self.lattice.load(at).to_vec();
        for (candidate, bound) in self.bound.iter_mut().enumerate() {
            let load = self.lattice.load(candidate);
            let mut cut = value;
            for ((g, &n), &n0) in slope.iter().zip(load).zip(&origin) {
                cut += g * (n - n0) as f64;
            }
            if cut > *bound {
                *bound = cut;
            }
        }
    }

    fn evaluate(&mut self, candidate: usize) {
        let net = self.lattice.net_load(candidate);
        let limit = self.incumbent + tie_tolerance(self.incumbent);
        let mut worst = (f64::NEG_INFINITY, usize::MAX);
        for k in 0..self.priority.len() {
            let e = self.priority[k];
            let value = self.evaluators[e].cost(&net);
            self.evaluations += 1;
            if value > limit {
                let (value, slope) = self.evaluators[e].cost_and_slope(&net);
                self.evaluations += 1;
                self.add_cut(candidate, value, &slope);
                self.status[candidate] = Status::Worse;
                self.promote(e);
                return;
            }
            if value > worst.0 {
                worst = (value, e);
            }
        }
        let (value, slope) = self.evaluators[worst.1].cost_and_slope(&net);
        self.evaluations += 1;
        self.add_cut(candidate, value, &slope);
        self.promote(worst.1);
        self.status[candidate] = Status::Exact(worst.0);
        if worst.0 < self.incumbent {
            self.incumbent = worst.0;
        }
    }

    fn next_open(&self) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (candidate, (&status, &bound)) in self.status.iter().zip(&self.bound).enumerate() {
            if status == Status::Open && best.is_none_or(|(_, b)| bound < b) {
                best = Some((candidate, bound));
            }
        }
        best.filter(|&(_, b)| b <= self.incumbent + tie_tolerance(self.incumbent)).map(|(c, _)| c)
    }
}

/// Returns the lexicographically first candidate among those whose
/// worst-case cost is minimal (within the tie tolerance).
pub(crate) fn exact_search(lattice: &PlanLattice, evaluators: &[Arc<dyn CostEvaluator>]) -> MasterSolution {
    let n = lattice.len();
    let mut search = Search {
        lattice,
        evaluators,
        bound: vec![0.0; n],
        status: vec![Status::Open; n],
        priority: (0..evaluators.len()).collect(),
        incumbent: f64::INFINITY,
        evaluations: 0,
    };
    let mut next = Some(0);
    while let Some(candidate) = next {
        search.evaluate(candidate);
        next = search.next_open();
    }
    let best = search
        .status
        .iter()
        .filter_map(|s| match s {
            Status::Exact(v) => Some(*v),
            _ => None,
        })
        .fold(f64::INFINITY, f64::min);
    let chosen = search
        .status
        .iter()
        .position(|s| matches!(s, Status::Exact(v) if *v <= best + tie_tolerance(best)))
        .expect("at least one candidate is evaluated exactly");
    let evaluations = search.evaluations;
    let mut solution = MasterSolution::at(lattice, chosen, evaluators);
    solution.evaluations += evaluations;
    solution
}
