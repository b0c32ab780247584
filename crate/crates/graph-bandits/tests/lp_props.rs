//! Property tests of the constraint-system solver.

#[allow(dead_code)]
mod common;

use graph_bandits::lp::{is_member, solve, LpInstance};
use proptest::prelude::*;

fn arb_instance(max_k: usize) -> impl Strategy<Value = LpInstance<f64>> {
    (2..=max_k)
        .prop_flat_map(|k| {
            (
                prop::collection::vec(0.05f64..0.8, k * k),
                prop::collection::vec(0.5f64..50.0, k),
                prop::collection::vec(0.01f64..1.0, k),
                0..k,
            )
        })
        .prop_map(|(coeffs, b, mut delta, best)| {
            delta[best] = 0.0;
            LpInstance::new(coeffs, b, delta, best)
        })
}

proptest! {
    #[test]
    fn solver_output_is_feasible(instance in arb_instance(6)) {
        let solution = solve(&instance).unwrap();
        prop_assert!(is_member(&instance, &solution.c));
        prop_assert!(solution.value >= 0.0);
    }

    #[test]
    fn membership_is_monotone(instance in arb_instance(6), bump in prop::collection::vec(0.0f64..5.0, 6)) {
        let solution = solve(&instance).unwrap();
        let k = instance.num_arms();
        let larger: Vec<f64> = solution
            .c
            .iter()
            .zip(&bump[..k])
            .map(|(&c, &extra)| c + extra)
            .collect();
        prop_assert!(is_member(&instance, &larger));
    }

    #[test]
    fn growing_a_coefficient_never_raises_the_value(
        instance in arb_instance(5),
        idx in 0usize..25,
        eps in 1e-6f64..0.2,
    ) {
        let k = instance.num_arms();
        let (i, j) = (idx % k, (idx / k) % k);
        let base = solve(&instance).unwrap().value;
        let bumped = solve(&instance.with_coeff(i, j, instance.coeff(i, j) + eps))
            .unwrap()
            .value;
        prop_assert!(bumped <= base + 1e-9, "{bumped} > {base}");
    }

    #[test]
    fn value_is_homogeneous_in_the_rhs(instance in arb_instance(5), lambda in 0.25f64..4.0) {
        let base = solve(&instance).unwrap().value;
        let scaled = solve(&instance.with_scaled_rhs(lambda)).unwrap().value;
        prop_assert!((scaled - lambda * base).abs() <= 1e-8, "{scaled} vs {}", lambda * base);
    }

    #[test]
    fn solver_matches_vertex_enumeration(instance in arb_instance(4)) {
        let solution = solve(&instance).unwrap();
        let brute = common::brute_force_lp_value(&instance).expect("feasible");
        prop_assert!((solution.value - brute).abs() <= 1e-8, "{} vs {brute}", solution.value);
    }
}
