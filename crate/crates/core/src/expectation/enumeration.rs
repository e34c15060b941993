//! Expected cost by summing over explicit intake scenarios.

use crate::error::{Error, Result};
use crate::intake::{BinomialIntakeLaw, IntakeSpace, ReducedIntakeSet};
use crate::planning::{rollover_cost_at, Instance, NetLoad, PullForwardPlan};

/// Spaces above this size are refused; use the convolution engine instead.
pub const DEFAULT_ENUMERATION_CAP: usize = 1_000_000;

/// Pairwise (cascade) summation.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 32 {
        return values.iter().sum();
    }
    let (left, right) = values.split_at(values.len() / 2);
    pairwise_sum(left) + pairwise_sum(right)
}

/// Full enumeration of `Σ_i P(i)·cost(i)`.
pub fn expected_cost_enumeration(
    instance: &Instance,
    plan: &PullForwardPlan,
    law: &BinomialIntakeLaw,
    space: &IntakeSpace,
    cap: usize,
) -> Result<f64> {
    if space.cardinality() > cap {
        return Err(Error::TooLarge {
            what: "intake space for enumeration",
            size: space.cardinality() as u128,
            cap: cap as u128,
        });
    }
    instance.validate_plan(plan)?;
    let net = instance.net_load(plan);
    let mut terms = Vec::with_capacity(space.cardinality());
    space.for_each(|_, intake| {
        terms.push(law.joint(intake) * rollover_cost_at(net.as_slice(), intake, instance.rollover_cost()));
    });
    Ok(pairwise_sum(&terms))
}

/// Enumeration over the retained intakes only; probabilities are not
/// renormalised, so the result never exceeds the full expectation.
pub fn expected_cost_reduced(
    instance: &Instance,
    plan: &PullForwardPlan,
    law: &BinomialIntakeLaw,
    reduced: &ReducedIntakeSet,
) -> Result<f64> {
    instance.validate_plan(plan)?;
    let net = instance.net_load(plan);
    let mut intake = vec![0; reduced.space().days()];
    let terms: Vec<f64> = reduced
        .indices()
        .iter()
        .map(|&index| {
            reduced.space().decode_into(index, &mut intake);
            law.joint(&intake) * rollover_cost_at(net.as_slice(), &intake, instance.rollover_cost())
        })
        .collect();
    Ok(pairwise_sum(&terms))
}

/// A list of intake vectors drawn from one intake space.
#[derive(Debug, Clone)]
pub struct ScenarioSet {
    space: IntakeSpace,
    indices: Vec<usize>,
    /// Row-major intake vectors, one row per scenario.
    intakes: Vec<u32>,
}

impl ScenarioSet {
    pub fn full(space: IntakeSpace) -> Self {
        let indices = (0..space.cardinality()).collect();
        Self::subset(space, indices)
    }

    pub fn subset(space: IntakeSpace, indices: Vec<usize>) -> Self {
        let days = space.days();
        let mut intakes = vec![0; indices.len() * days];
        for (row, &index) in indices.iter().enumerate() {
            space.decode_into(index, &mut intakes[row * days..(row + 1) * days]);
        }
        Self { space, indices, intakes }
    }

    pub fn from_reduced(reduced: &ReducedIntakeSet) -> Self {
        Self::subset(reduced.space().clone(), reduced.indices().to_vec())
    }

    pub fn space(&self) -> &IntakeSpace {
        &self.space
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn intake(&self, row: usize) -> &[u32] {
        let days = self.space.days();
        &self.intakes[row * days..(row + 1) * days]
    }

    /// Joint probability of every scenario under a binomial law.
    pub fn weights_under(&self, law: &BinomialIntakeLaw) -> Vec<f64> {
        (0..self.len()).map(|row| law.joint(self.intake(row))).collect()
    }

    /// Total rollover cost of each scenario for one net load.
    pub fn costs(&self, net: &NetLoad, cost: &[f64]) -> Vec<f64> {
        (0..self.len()).map(|row| rollover_cost_at(net.as_slice(), self.intake(row), cost)).collect()
    }

    /// Weighted cost and its subgradient with respect to the net load.
    pub fn weighted_cost_and_slope(&self, net: &NetLoad, cost: &[f64], weights: &[f64]) -> (f64, Vec<f64>) {
        let days = self.space.days();
        let mut slope = vec![0.0; days];
        let mut terms = Vec::with_capacity(self.len());
        for (row, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let intake = self.intake(row);
            let mut carried = 0i64;
            let mut start = 0usize;
            let mut scenario = 0.0;
            for day in 0..days {
                let v = carried + intake[day] as i64 + net.0[day];
                if v > 0 {
                    if carried == 0 {
                        start = day;
                    }
                    carried = v;
                    scenario += cost[day] * v as f64;
                    for s in slope.iter_mut().take(day + 1).skip(start) {
                        *s += w * cost[day];
                    }
                } else {
                    carried = 0;
                }
            }
            terms.push(w * scenario);
        }
        (pairwise_sum(&terms), slope)
    }
}
