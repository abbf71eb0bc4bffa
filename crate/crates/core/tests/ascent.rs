mod common;

use common::random_relation;
use proptest::prelude::*;
use qadv_core::adversary::{alb2_to_scheme, alb4_value, RelationInstance, WeightScheme};
use qadv_core::certificates::cert_stats;
use qadv_core::instances::{gen_named, NamedFunction};
use qadv_core::optimizer::{
    ascend_scheme, best_known_bound, exact_alb1_small, AscentConfig, ALB1_PAIR_CAP,
};
use qadv_core::{rational, FunctionTable};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn relation(seed: u64) -> RelationInstance {
    let (f, pairs) = random_relation(&mut ChaCha8Rng::seed_from_u64(seed), 3);
    RelationInstance::from_table(&f, &pairs, false).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ascent_output_is_valid_and_never_worse(seed in any::<u64>(), run in 0u64..4) {
        let rel = relation(seed);
        let init = WeightScheme::uniform(&rel);
        let start = alb4_value(&rel, &init).unwrap().value_squared;
        let (scheme, report) = ascend_scheme(&rel, &init, &AscentConfig::with_iters(30, run)).unwrap();
        prop_assert!(scheme.validate(&rel).unwrap().is_valid());
        prop_assert_eq!(alb4_value(&rel, &scheme).unwrap().value_squared, report.value_squared.clone());
        prop_assert!(report.value_squared >= start);
    }

    #[test]
    fn ascent_is_deterministic(seed in any::<u64>()) {
        let rel = relation(seed);
        let init = alb2_to_scheme(&rel).unwrap();
        let cfg = AscentConfig::with_iters(20, 5);
        let (a, ra) = ascend_scheme(&rel, &init, &cfg).unwrap();
        let (b, rb) = ascend_scheme(&rel, &init, &cfg).unwrap();
        prop_assert_eq!(ra, rb);
        prop_assert_eq!(a.to_json(&rel).unwrap(), b.to_json(&rel).unwrap());
    }
}

#[test]
fn more_passes_never_lower_the_best_bound() {
    for id in [0b0001_0111u64, 0b1001_0110, 0b0110_1000, 0b1110_0001] {
        let f = FunctionTable::from_boolean_id(3, id).unwrap();
        let short = best_known_bound(&f, &AscentConfig::with_iters(5, 0)).unwrap();
        let long = best_known_bound(&f, &AscentConfig::with_iters(80, 0)).unwrap();
        assert!(
            long.report.value_squared >= short.report.value_squared,
            "id {id}"
        );
    }
}

#[test]
fn best_bound_is_deterministic_across_runs() {
    let f = FunctionTable::from_boolean_id(3, 0b1110_1000).unwrap();
    let cfg = AscentConfig::with_iters(50, 42);
    let a = best_known_bound(&f, &cfg).unwrap();
    let b = best_known_bound(&f, &cfg).unwrap();
    assert_eq!(a.report, b.report);
    assert_eq!(a.start, b.start);
    assert_eq!(
        a.scheme.to_json(&a.relation).unwrap(),
        b.scheme.to_json(&b.relation).unwrap()
    );
}

#[test]
fn exact_optima_of_or_and_and_parity() {
    for n in 2..=4 {
        for name in [NamedFunction::Or, NamedFunction::And] {
            let f = gen_named(name, n, 2).unwrap();
            let opt = exact_alb1_small(&f, ALB1_PAIR_CAP).unwrap();
            assert_eq!(
                opt.report.value_squared,
                rational::int(n as i64),
                "{name} {n}"
            );
        }
    }
    for n in 2..=3 {
        let f = gen_named(NamedFunction::Parity, n, 2).unwrap();
        let opt = exact_alb1_small(&f, ALB1_PAIR_CAP).unwrap();
        assert_eq!(opt.report.value_squared, rational::int((n * n) as i64));
    }
}

#[test]
fn parity_and_or_meet_the_certificate_ceiling() {
    for (f, n) in [
        (gen_named(NamedFunction::Parity, 2, 2).unwrap(), 2),
        (gen_named(NamedFunction::Parity, 3, 2).unwrap(), 3),
        (gen_named(NamedFunction::Or, 2, 2).unwrap(), 2),
    ] {
        let best = best_known_bound(&f, &AscentConfig::default()).unwrap();
        let ceiling = rational::int((n * cert_stats(&f).unwrap().c_minus) as i64);
        assert_eq!(best.report.value_squared, ceiling);
    }
}

#[test]
fn majority_is_sandwiched_below_its_product_ceiling() {
    let f = gen_named(NamedFunction::Majority, 3, 2).unwrap();
    let best = best_known_bound(&f, &AscentConfig::with_iters(1000, 42)).unwrap();
    let stats = cert_stats(&f).unwrap();
    assert!(best.report.value_squared <= rational::int((stats.c0 * stats.c1) as i64));
    assert!(best.report.value >= 1.99);
}
