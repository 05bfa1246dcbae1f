mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;

use common::*;
use equires_core::catalog::object;
use equires_core::driver::{resolve_fiber, DriverConfig, StepKind};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn delta_top_equals_top_of_homogenized(inst in instance()) {
        delta_top_identity(&inst)?;
    }

    #[test]
    fn order_bound_iff_top_derivatives_in_center(inst in instance()) {
        order_criterion(&inst)?;
    }

    #[test]
    fn transform_commutes_with_fiber(inst in permissible_instance()) {
        fiber_transform(&inst)?;
    }

    #[test]
    fn delta_commutes_with_fiber(inst in instance()) {
        fiber_delta(&inst)?;
    }

    #[test]
    fn blowup_commutes_with_fiber(inst in instance()) {
        blowup_base_change(&inst)?;
    }
}

proptest! {
    #![proptest_config(config(40))]

    #[test]
    fn monomial_resolution_matches_exponent_simulation(
        exps in prop::collection::vec(0u32..=4, 1..=3),
        b in 1u32..=3,
    ) {
        prop_assume!(exps.iter().any(|&a| a > 0));
        let names = ["x", "y", "z"];
        let vars = &names[..exps.len()];
        let gen = vars.iter().zip(&exps).map(|(v, a)| format!("{v}^{a}")).collect::<Vec<_>>().join("*");
        let obj = object(vars, 1, &[gen.as_str()], b, vars);
        let run = resolve_fiber(&obj, &DriverConfig::default()).unwrap();
        prop_assert!(run.last.sing_is_empty());
        prop_assert!(run.steps.iter().all(|s| s.kind == StepKind::Monomial));
        let chart: BTreeMap<usize, (usize, u32)> = exps.iter().enumerate().map(|(v, &a)| (v, (v, a))).collect();
        prop_assert_eq!(run.steps.len(), monomial_steps(chart, b, exps.len()));
    }
}
