//! Parametric distributionally robust solvers: the exact model, the
//! cutting-surface loop (full and extreme-point separation), the
//! reduced-intake approximation, the robust baseline, a brute-force oracle
//! and a Benders decomposition, together with the gap metrics that compare
//! them.

mod ao;
mod benders;
mod cutting_surface;
mod exact;
mod metrics;
mod oracle;
mod report;
mod ro;

pub use ao::solve_reduced_intake;
pub use benders::{solve_benders, BendersCut, BendersOptions, BendersState, DEFAULT_BENDERS_SCENARIO_CAP};
pub use cutting_surface::{solve_cutting_surface, solve_cs, solve_cs_full, CuttingSurfaceOptions};
pub use exact::{distribution_separation, solve_exact, Separation};
pub use metrics::{brute_force_metrics, worst_case_value, GapMetrics, OPTIMALITY_TOLERANCE};
pub use oracle::solve_brute_force;
pub use report::{Algorithm, IterationRecord, SolveReport, StopReason, WorstCase};
pub use ro::solve_robust;

use std::sync::Arc;

use crate::error::Result;
use crate::expectation::{BinomialEvaluator, CostEvaluator, LawCache};
use crate::intake::SuccessProbs;

pub(crate) fn binomial_evaluators(
    cache: &LawCache,
    members: &[SuccessProbs],
    rollover_cost: &[f64],
) -> Result<Vec<Arc<dyn CostEvaluator>>> {
    members
        .iter()
        .map(|p| Ok(Arc::new(BinomialEvaluator::new(cache.get(p)?, rollover_cost)) as Arc<dyn CostEvaluator>))
        .collect()
}

/// Index of the largest value; near-ties go to the lexicographically
/// smallest parameter.
pub(crate) fn worst_member(values: &[f64], members: &[SuccessProbs]) -> usize {
    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let slack = 1e-12 * top.abs().max(1.0);
    (0..values.len())
        .filter(|&k| values[k] >= top - slack)
        .min_by(|&a, &b| members[a].cmp(&members[b]).then(a.cmp(&b)))
        .expect("at least one member")
}

pub(crate) fn elapsed_ms(start: std::time::Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}
