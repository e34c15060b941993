//! Node relaxations through the `microlp` revised simplex.
//!
//! The LU-factorised basis copes with the degenerate, widely scaled
//! relaxations of the epigraph and Benders masters, where the dense tableau
//! loses accuracy. No duals are reported.

use std::collections::BTreeMap;

use microlp::{ComparisonOp, OptimizationDirection, Problem, SolveOutcome};

use crate::model::{ConstraintOp, LinearProgram, Sense};
use crate::simplex::{LpSolution, LpStatus};
use crate::{LpEngine, LpError};

/// Revised simplex engine; integrality flags are ignored.
#[derive(Debug, Clone, Copy, Default)]
pub struct RevisedSimplex;

impl LpEngine for RevisedSimplex {
    fn solve(&self, lp: &LinearProgram) -> Result<LpSolution, LpError> {
        lp.validate()?;
        let direction = match lp.sense {
            Sense::Minimize => OptimizationDirection::Minimize,
            Sense::Maximize => OptimizationDirection::Maximize,
        };
        let mut problem = Problem::new(direction);
        let vars: Vec<_> = (0..lp.objective.len())
            .map(|j| problem.add_var(lp.objective[j], (lp.lower[j], lp.upper[j])))
            .collect();
        // Duplicate triplets add up, as in the dense tableau.
        let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); lp.rows.len()];
        for &(r, j, v) in &lp.entries {
            *rows[r].entry(j).or_insert(0.0) += v;
        }
        for (row, terms) in lp.rows.iter().zip(rows) {
            let op = match row.op {
                ConstraintOp::Le => ComparisonOp::Le,
                ConstraintOp::Eq => ComparisonOp::Eq,
                ConstraintOp::Ge => ComparisonOp::Ge,
            };
            problem.add_constraint(terms.into_iter().map(|(j, v)| (vars[j], v)).collect::<Vec<_>>(), op, row.rhs);
        }
        let none = |status| LpSolution { status, x: Vec::new(), duals: Vec::new(), objective: f64::NAN, pivots: 0 };
        match problem.solve() {
            Ok(SolveOutcome::Solution(solution)) => {
                let x: Vec<f64> = vars.iter().map(|&v| solution.var_value_raw(v)).collect();
                let objective = lp.evaluate(&x);
                Ok(LpSolution { status: LpStatus::Optimal, x, duals: Vec::new(), objective, pivots: 0 })
            }
            Ok(SolveOutcome::Interrupted(_)) => Ok(none(LpStatus::Stalled)),
            Err(microlp::Error::Infeasible) => Ok(none(LpStatus::Infeasible)),
            Err(microlp::Error::Unbounded) => Ok(none(LpStatus::Unbounded)),
            Err(other) => Err(LpError::Engine(other.to_string())),
        }
    }
}
