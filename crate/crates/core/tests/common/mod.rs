//! Shared fixtures for the integration tests.
#![allow(dead_code)]

use proptest::prelude::*;
use tactical_core::intake::SuccessProbs;
use tactical_core::master::PlanLattice;
use tactical_core::planning::{Instance, PullForwardPlan};

/// The two-day instance used throughout the worked example.
pub fn worked() -> Instance {
    Instance::with_unit_costs(1, vec![30, 10], vec![5, 20], vec![20, 20]).unwrap()
}

/// Small instances: up to four days, intake spaces of at most 625 points.
pub fn small_instance() -> impl Strategy<Value = Instance> {
    (2usize..=4)
        .prop_flat_map(|days| {
            (
                1..days,
                prop::collection::vec(0u32..12, days),
                prop::collection::vec(0u32..12, days),
                prop::collection::vec(0.5f64..2.0, days),
                prop::collection::vec(0u32..5, days),
            )
        })
        .prop_map(|(window, capacity, workstack, cost, intake_max)| {
            Instance::new(window, capacity, workstack, cost, intake_max).unwrap()
        })
}

pub fn probs(days: usize) -> impl Strategy<Value = SuccessProbs> {
    prop::collection::vec(0.02f64..0.98, days).prop_map(SuccessProbs)
}

/// The `pick`-th feasible plan, wrapping around.
pub fn some_plan(instance: &Instance, pick: usize) -> PullForwardPlan {
    let lattice = PlanLattice::new(instance, 1_000_000).unwrap();
    lattice.plan(pick % lattice.len())
}
