//! Binomial intake machinery: intake spaces, PMFs, estimation, parametric
//! ambiguity sets and the probability-thresholded intake subset.

mod ambiguity;
mod binomial;
mod mle;
mod reduce;
mod space;
pub mod special;

pub use ambiguity::{
    build_confidence_set, build_extreme_set, BaseGrid, ConfidenceSpec, ParametricAmbiguitySet, SetKind,
};
pub use binomial::{binomial_pmf, binomial_pmf_table, joint_pmf, BinomialIntakeLaw};
pub use mle::{clamp_estimate, mle_success_probs};
pub use reduce::{reduce_intake_set, ReducedIntakeSet, DEFAULT_BETA};
pub use space::{space_cardinality, IntakeSpace};
pub use special::chi_square_quantile;

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

/// Per-day binomial success probabilities.
///
/// Equality, ordering and hashing are by exact bit pattern (`total_cmp`), so
/// the type can key maps and be sorted lexicographically.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SuccessProbs(pub Vec<f64>);

impl SuccessProbs {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn uniform(value: f64, days: usize) -> Self {
        Self(vec![value; days])
    }
}

impl PartialEq for SuccessProbs {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for SuccessProbs {}

impl PartialOrd for SuccessProbs {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SuccessProbs {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.total_cmp(b) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl Hash for SuccessProbs {
    fn hash<H: Hasher>(&self, state: &mut H) {
        for v in &self.0 {
            v.to_bits().hash(state);
        }
    }
}

impl fmt::Display for SuccessProbs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

impl From<Vec<f64>> for SuccessProbs {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}
