//! Exact expected rollover cost: a convolution engine over the law of the
//! rollover chain, and an enumeration engine over explicit intake scenarios.
//!
//! Both engines also return a subgradient of the cost with respect to the
//! net daily load. The cost is convex in the load (rollover is a running
//! maximum of partial sums), which the plan search relies on.

mod convolution;
mod enumeration;
mod evaluator;
mod law;

pub use convolution::{
    cost_and_slope_convolution, expected_cost_convolution, expected_rollover, rollover_distribution,
    ExpectedCost, RolloverDistribution,
};
pub use enumeration::{
    expected_cost_enumeration, expected_cost_reduced, pairwise_sum, ScenarioSet, DEFAULT_ENUMERATION_CAP,
};
pub use evaluator::{BinomialEvaluator, CostEvaluator, ScenarioEvaluator};
pub use law::LawCache;
