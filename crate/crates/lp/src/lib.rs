//! LP and MIP solving for small planning models.
//!
//! [`lp_solve`] runs a dense two-phase primal simplex (Harris ratio test,
//! lexicographic anti-cycling, periodic refactorisation) and reports primal
//! values, row duals and the objective. [`mip_solve`] is a best-bound
//! branch-and-bound that branches on the most fractional integer variable and
//! solves node relaxations with the LU-based [`RevisedSimplex`].
//!
//! Dual values follow the sensitivity convention `dual[i] = ∂z*/∂b[i]`: in a
//! minimisation, `≥` rows carry non-negative duals and `≤` rows non-positive
//! ones; in a maximisation the signs flip.
//!
//! The [`LpEngine`] trait is the adapter point for solvers; [`EmbeddedSimplex`]
//! and [`RevisedSimplex`] implement it.

mod mip;
mod model;
mod revised;
mod simplex;

pub use mip::{mip_solve, mip_solve_with, MipOptions, MipSolution, MipStatus};
pub use model::{ConstraintOp, LinearProgram, Sense};
pub use revised::RevisedSimplex;
pub use simplex::{lp_solve, lp_solve_with, LpSolution, LpStatus, SimplexOptions};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("variable index {index} out of range ({count} variables)")]
    VariableOutOfRange { index: usize, count: usize },
    #[error("non-finite coefficient in {location}")]
    NonFinite { location: String },
    #[error("variable {index} has lower bound {lower} above upper bound {upper}")]
    InvertedBounds { index: usize, lower: f64, upper: f64 },
    #[error("simplex stalled after {pivots} pivots")]
    Stalled { pivots: usize },
    #[error("LP engine failed: {0}")]
    Engine(String),
}

/// Procedure-call contract for an LP engine: take a program, hand back
/// status, primal values, duals and objective.
pub trait LpEngine {
    fn solve(&self, lp: &LinearProgram) -> Result<LpSolution, LpError>;
}

/// The built-in dense simplex.
#[derive(Debug, Clone, Default)]
pub struct EmbeddedSimplex {
    pub options: SimplexOptions,
}

impl LpEngine for EmbeddedSimplex {
    fn solve(&self, lp: &LinearProgram) -> Result<LpSolution, LpError> {
        lp_solve_with(lp, &self.options)
    }
}
