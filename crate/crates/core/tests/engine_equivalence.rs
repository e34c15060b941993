mod common;

use common::{probs, small_instance, some_plan};
use proptest::prelude::*;
use tactical_core::expectation::{expected_cost_convolution, expected_cost_enumeration, expected_cost_reduced};
use tactical_core::intake::{build_confidence_set, reduce_intake_set, BinomialIntakeLaw, IntakeSpace};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn convolution_matches_enumeration(
        (instance, p) in small_instance().prop_flat_map(|i| { let d = i.horizon(); (Just(i), probs(d)) }),
        pick in 0usize..10_000,
    ) {
        let plan = some_plan(&instance, pick);
        let law = BinomialIntakeLaw::new(p, instance.intake_max()).unwrap();
        let space = IntakeSpace::new(instance.intake_max()).unwrap();
        let fast = expected_cost_convolution(&instance, &plan, &law).unwrap().total;
        let slow = expected_cost_enumeration(&instance, &plan, &law, &space, 1_000_000).unwrap();
        prop_assert!((fast - slow).abs() <= 1e-9 * slow.abs().max(1.0), "{fast} vs {slow}");
    }

    #[test]
    fn cost_grows_with_success_probability(
        (instance, p) in small_instance().prop_flat_map(|i| { let d = i.horizon(); (Just(i), probs(d)) }),
        pick in 0usize..10_000,
        day in 0usize..4,
        bump in 0.0f64..0.3,
    ) {
        let plan = some_plan(&instance, pick);
        let day = day % instance.horizon();
        let mut higher = p.clone();
        higher.0[day] = (higher.0[day] + bump).min(1.0);
        let low = BinomialIntakeLaw::new(p, instance.intake_max()).unwrap();
        let high = BinomialIntakeLaw::new(higher, instance.intake_max()).unwrap();
        let a = expected_cost_convolution(&instance, &plan, &low).unwrap().total;
        let b = expected_cost_convolution(&instance, &plan, &high).unwrap().total;
        prop_assert!(b >= a - 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn joint_pmf_sums_to_one(
        (instance, p) in small_instance().prop_flat_map(|i| { let d = i.horizon(); (Just(i), probs(d)) }),
    ) {
        let law = BinomialIntakeLaw::new(p, instance.intake_max()).unwrap();
        let space = IntakeSpace::new(instance.intake_max()).unwrap();
        let mut total = 0.0;
        space.for_each(|_, intake| total += law.joint(intake));
        prop_assert!((total - 1.0).abs() < 1e-10);
    }

    /// Dropping intakes loses at most the worst rollover cost times the
    /// dropped mass.
    #[test]
    fn truncation_error_is_bounded(
        instance in small_instance(),
        pick in 0usize..10_000,
        beta in 0.0f64..0.05,
    ) {
        let estimate = vec![0.6; instance.horizon()];
        let theta = build_confidence_set(&estimate, 10, instance.intake_max(), 0.05, 5).unwrap();
        let reduced = match reduce_intake_set(&theta, instance.intake_max(), beta) {
            Ok(r) => r,
            Err(_) => return Ok(()),
        };
        let plan = some_plan(&instance, pick);
        let net = instance.net_load(&plan);
        let bound: f64 = instance.rollover_bound(&net).iter().zip(instance.rollover_cost()).map(|(&u, a)| u as f64 * a).sum();
        let space = IntakeSpace::new(instance.intake_max()).unwrap();
        for p in theta.members() {
            let law = BinomialIntakeLaw::new(p.clone(), instance.intake_max()).unwrap();
            let full = expected_cost_enumeration(&instance, &plan, &law, &space, 1_000_000).unwrap();
            let kept = expected_cost_reduced(&instance, &plan, &law, &reduced).unwrap();
            let mut retained = 0.0;
            for &index in reduced.indices() {
                retained += law.joint(&space.intake_at(index));
            }
            let diff = full - kept;
            prop_assert!(diff >= -1e-12);
            prop_assert!(diff <= bound * (1.0 - retained) + 1e-9);
        }
    }
}
