use std::sync::Arc;

use super::convolution::{cost_and_slope_convolution, expected_rollover};
use super::enumeration::ScenarioSet;
use crate::error::Result;
use crate::intake::{BinomialIntakeLaw, IntakeSpace, SuccessProbs};
use crate::planning::NetLoad;

/// One intake distribution, seen through the expected cost it induces.
///
/// Costs depend on a plan only through its net load, so evaluators take a
/// [`NetLoad`]. Implementations must be pure and deterministic.
pub trait CostEvaluator: Send + Sync {
    fn cost(&self, net: &NetLoad) -> f64;

    /// Cost and a subgradient with respect to the net load.
    fn cost_and_slope(&self, net: &NetLoad) -> (f64, Vec<f64>);

    /// Joint weight of every intake in `space` (index order), for encodings
    /// that need the distribution explicitly.
    fn joint_weights(&self, space: &IntakeSpace) -> Vec<f64>;

    /// Short human-readable identity (a parameter vector or a label).
    fn describe(&self) -> String;

    /// The success-probability vector, for binomial evaluators.
    fn success_probs(&self) -> Option<&SuccessProbs> {
        None
    }
}

/// Independent binomial intakes, evaluated by convolution.
#[derive(Debug, Clone)]
pub struct BinomialEvaluator {
    law: Arc<BinomialIntakeLaw>,
    rollover_cost: Arc<[f64]>,
}

impl BinomialEvaluator {
    pub fn new(law: Arc<BinomialIntakeLaw>, rollover_cost: &[f64]) -> Self {
        Self { law, rollover_cost: rollover_cost.into() }
    }

    pub fn law(&self) -> &BinomialIntakeLaw {
        &self.law
    }

    pub fn expected_rollover(&self, net: &NetLoad) -> Vec<f64> {
        expected_rollover(net, &self.law)
    }
}

impl CostEvaluator for BinomialEvaluator {
    fn cost(&self, net: &NetLoad) -> f64 {
        expected_rollover(net, &self.law).iter().zip(self.rollover_cost.iter()).map(|(e, a)| e * a).sum()
    }

    fn cost_and_slope(&self, net: &NetLoad) -> (f64, Vec<f64>) {
        cost_and_slope_convolution(net, &self.law, &self.rollover_cost)
    }

    fn joint_weights(&self, space: &IntakeSpace) -> Vec<f64> {
        let mut weights = Vec::with_capacity(space.cardinality());
        space.for_each(|_, intake| weights.push(self.law.joint(intake)));
        weights
    }

    fn describe(&self) -> String {
        self.law.probs().to_string()
    }

    fn success_probs(&self) -> Option<&SuccessProbs> {
        Some(self.law.probs())
    }
}

/// Explicit weights on a scenario list (weights need not sum to one).
#[derive(Debug, Clone)]
pub struct ScenarioEvaluator {
    scenarios: Arc<ScenarioSet>,
    weights: Vec<f64>,
    rollover_cost: Arc<[f64]>,
    label: String,
    probs: Option<SuccessProbs>,
}

impl ScenarioEvaluator {
    pub fn new(scenarios: Arc<ScenarioSet>, weights: Vec<f64>, rollover_cost: &[f64], label: String) -> Result<Self> {
        if weights.len() != scenarios.len() {
            return Err(crate::Error::LengthMismatch {
                what: "scenario weights",
                expected: scenarios.len(),
                got: weights.len(),
            });
        }
        Ok(Self { scenarios, weights, rollover_cost: rollover_cost.into(), label, probs: None })
    }

    /// Binomial weights restricted to the scenario list (a truncated law
    /// when the list is a strict subset of the space).
    pub fn truncated_binomial(scenarios: Arc<ScenarioSet>, law: &BinomialIntakeLaw, rollover_cost: &[f64]) -> Self {
        let weights = scenarios.weights_under(law);
        Self {
            scenarios,
            weights,
            rollover_cost: rollover_cost.into(),
            label: law.probs().to_string(),
            probs: Some(law.probs().clone()),
        }
    }

    pub fn scenarios(&self) -> &ScenarioSet {
        &self.scenarios
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl CostEvaluator for ScenarioEvaluator {
    fn cost(&self, net: &NetLoad) -> f64 {
        self.cost_and_slope(net).0
    }

    fn cost_and_slope(&self, net: &NetLoad) -> (f64, Vec<f64>) {
        self.scenarios.weighted_cost_and_slope(net, &self.rollover_cost, &self.weights)
    }

    fn joint_weights(&self, space: &IntakeSpace) -> Vec<f64> {
        let mut weights = vec![0.0; space.cardinality()];
        for (&index, &w) in self.scenarios.indices().iter().zip(&self.weights) {
            weights[index] += w;
        }
        weights
    }

    fn describe(&self) -> String {
        self.label.clone()
    }

    fn success_probs(&self) -> Option<&SuccessProbs> {
        self.probs.as_ref()
    }
}
