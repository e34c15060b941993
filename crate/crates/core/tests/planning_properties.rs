mod common;

use common::{small_instance, some_plan};
use proptest::prelude::*;
use tactical_core::planning::{DayPair, Instance, PullForwardPlan};

fn intake_within(instance: &Instance, raw: &[u32]) -> Vec<u32> {
    raw.iter().zip(instance.intake_max()).map(|(&r, &m)| r % (m + 1)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn lattice_plans_are_feasible(instance in small_instance(), pick in 0usize..10_000) {
        let plan = some_plan(&instance, pick);
        prop_assert!(instance.validate_plan(&plan).unwrap().is_ok());
    }

    #[test]
    fn rollover_is_monotone_in_intake(
        instance in small_instance(),
        pick in 0usize..10_000,
        raw in prop::collection::vec(0u32..100, 4),
        day in 0usize..4,
    ) {
        let plan = some_plan(&instance, pick);
        let intake = intake_within(&instance, &raw[..instance.horizon()]);
        let day = day % instance.horizon();
        prop_assume!(intake[day] < instance.intake_max()[day]);
        let mut bumped = intake.clone();
        bumped[day] += 1;
        let base = instance.rollover_trajectory(&plan, &intake).unwrap();
        let more = instance.rollover_trajectory(&plan, &bumped).unwrap();
        prop_assert!(base.rollover.iter().zip(&more.rollover).all(|(a, b)| a <= b));
        prop_assert!(base.rollover.iter().all(|&r| r >= 0.0));
        let cost: f64 = base.rollover.iter().zip(instance.rollover_cost()).map(|(r, a)| r * a).sum();
        prop_assert!((cost - base.total_cost).abs() < 1e-9);
    }

    #[test]
    fn extra_capacity_never_raises_rollover(
        instance in small_instance(),
        pick in 0usize..10_000,
        raw in prop::collection::vec(0u32..100, 4),
        day in 0usize..4,
    ) {
        let plan = some_plan(&instance, pick);
        let intake = intake_within(&instance, &raw[..instance.horizon()]);
        let mut capacity = instance.capacity().to_vec();
        capacity[day % instance.horizon()] += 1;
        let wider = Instance::new(
            instance.window(),
            capacity,
            instance.workstack().to_vec(),
            instance.rollover_cost().to_vec(),
            instance.intake_max().to_vec(),
        )
        .unwrap();
        let base = instance.rollover_trajectory(&plan, &intake).unwrap();
        let relaxed = wider.rollover_trajectory(&plan, &intake).unwrap();
        prop_assert!(relaxed.rollover.iter().zip(&base.rollover).all(|(a, b)| a <= b));
    }

    /// The recursion's output is the smallest vector satisfying the
    /// carry-over inequalities: lowering any entry breaks one of them.
    #[test]
    fn rollover_is_minimal(
        instance in small_instance(),
        pick in 0usize..10_000,
        raw in prop::collection::vec(0u32..100, 4),
    ) {
        let plan = some_plan(&instance, pick);
        let intake = intake_within(&instance, &raw[..instance.horizon()]);
        let net = instance.net_load(&plan);
        let r = instance.rollover_trajectory(&plan, &intake).unwrap().rollover;
        let satisfied = |r: &[f64]| {
            let mut previous = 0.0;
            r.iter().enumerate().all(|(d, &value)| {
                let ok = value >= 0.0 && value >= previous + intake[d] as f64 + net.0[d] as f64 - 1e-12;
                previous = value;
                ok
            })
        };
        prop_assert!(satisfied(&r));
        for d in 0..r.len() {
            if r[d] >= 1.0 {
                let mut lower = r.clone();
                lower[d] -= 1.0;
                prop_assert!(!satisfied(&lower));
            }
        }
    }

    #[test]
    fn feasible_pairs_follow_the_definition(instance in small_instance()) {
        let sets = instance.pair_sets();
        for pair in &sets.all {
            let positive = instance.capacity()[pair.work_day - 1] > instance.workstack()[pair.work_day - 1]
                && instance.workstack()[pair.due_day - 1] > 0;
            prop_assert_eq!(sets.feasible.contains(pair), positive);
        }
    }
}

#[test]
fn plans_round_trip_through_text() {
    let plan = PullForwardPlan::from_entries([(DayPair::new(2, 1), 9), (DayPair::new(3, 1), 2)]);
    let text = plan.to_string();
    assert_eq!(text.parse::<PullForwardPlan>().unwrap(), plan);
    assert_eq!("0".parse::<PullForwardPlan>().unwrap(), PullForwardPlan::zero());
}
