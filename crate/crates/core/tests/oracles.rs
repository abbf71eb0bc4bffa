mod common;

use common::{c0_c1, random_relation, ratio, relation_counts, values_of};
use proptest::prelude::*;
use qadv_core::adversary::{
    alb1_bound, alb2_bound, alb2_to_scheme, alb3_value, alb4_value, RelationInstance, WeightScheme,
};
use qadv_core::certificates::{cert_stats, min_certificate};
use qadv_core::rational;
use qadv_core::FunctionTable;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn cert_stats_match_brute_force_on_three_variables() {
    for id in 1..255u64 {
        let f = FunctionTable::from_boolean_id(3, id).unwrap();
        let stats = cert_stats(&f).unwrap();
        assert_eq!((stats.c0, stats.c1), c0_c1(&values_of(id, 3), 3), "id {id}");
    }
}

#[test]
fn cert_stats_match_brute_force_on_sampled_four_variable_functions() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let id = rand::Rng::gen_range(&mut rng, 1..u16::MAX as u64);
        let f = FunctionTable::from_boolean_id(4, id).unwrap();
        let stats = cert_stats(&f).unwrap();
        assert_eq!((stats.c0, stats.c1), c0_c1(&values_of(id, 4), 4), "id {id}");
    }
}

#[test]
fn alb1_and_alb2_match_brute_force_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..300 {
        let (f, pairs) = random_relation(&mut rng, 3);
        let rel = RelationInstance::from_table(&f, &pairs, false).unwrap();
        let (m, mp, l, lp, lmax) = relation_counts(&pairs, 3);
        assert_eq!(
            alb1_bound(&rel).unwrap().value_squared,
            ratio(m * mp, l * lp)
        );
        assert_eq!(alb2_bound(&rel).unwrap().value_squared, ratio(m * mp, lmax));
    }
}

#[test]
fn min_certificate_is_a_true_certificate() {
    let f = FunctionTable::from_boolean_id(3, 0b1110_1000).unwrap();
    for x in 0..8 {
        let word = f.word(x);
        let (size, set) = min_certificate(&f, &word).unwrap();
        assert_eq!(size, set.len());
        for z in 0..8 {
            let other = f.word(z);
            if set
                .positions()
                .iter()
                .all(|&p| other.symbols()[p] == word.symbols()[p])
            {
                assert_eq!(f.value_at(z), f.value_at(x));
            }
        }
    }
}

fn relation_strategy() -> impl Strategy<Value = (FunctionTable, Vec<(usize, usize)>)> {
    any::<u64>().prop_map(|seed| random_relation(&mut ChaCha8Rng::seed_from_u64(seed), 3))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn alb2_dominates_alb1((f, pairs) in relation_strategy()) {
        let rel = RelationInstance::from_table(&f, &pairs, false).unwrap();
        prop_assert!(alb2_bound(&rel).unwrap().value_squared >= alb1_bound(&rel).unwrap().value_squared);
    }

    #[test]
    fn converted_scheme_is_valid_and_exact((f, pairs) in relation_strategy()) {
        let rel = RelationInstance::from_table(&f, &pairs, false).unwrap();
        let scheme = alb2_to_scheme(&rel).unwrap();
        prop_assert!(scheme.validate(&rel).unwrap().is_valid());
        let alb2 = alb2_bound(&rel).unwrap().value_squared;
        prop_assert_eq!(alb3_value(&rel, &scheme).unwrap().value_squared, alb2.clone());
        prop_assert!(alb4_value(&rel, &scheme).unwrap().value_squared >= alb2);
    }

    #[test]
    fn transpose_preserves_bounds((f, pairs) in relation_strategy()) {
        let rel = RelationInstance::from_table(&f, &pairs, false).unwrap();
        let t = rel.transpose();
        prop_assert_eq!(alb1_bound(&t).unwrap().value_squared, alb1_bound(&rel).unwrap().value_squared);
        prop_assert_eq!(alb2_bound(&t).unwrap().value_squared, alb2_bound(&rel).unwrap().value_squared);
    }

    #[test]
    fn uniform_scaling_leaves_scheme_values_unchanged((f, pairs) in relation_strategy(), c in 1i64..50) {
        let rel = RelationInstance::from_table(&f, &pairs, false).unwrap();
        let s = WeightScheme::uniform(&rel);
        let scaled = s.scaled(&rational::int(c));
        prop_assert_eq!(
            alb4_value(&rel, &scaled).unwrap().value_squared,
            alb4_value(&rel, &s).unwrap().value_squared
        );
    }

    #[test]
    fn relation_json_round_trips((f, pairs) in relation_strategy()) {
        let rel = RelationInstance::from_table(&f, &pairs, false).unwrap();
        let back = RelationInstance::from_json(&rel.to_json().unwrap(), Some(&f)).unwrap();
        prop_assert_eq!(back.to_json().unwrap(), rel.to_json().unwrap());
    }

    #[test]
    fn any_bound_respects_certificate_ceiling((f, pairs) in relation_strategy()) {
        let rel = RelationInstance::from_table(&f, &pairs, false).unwrap();
        let stats = cert_stats(&f).unwrap();
        let ceiling = rational::int((3 * stats.c_minus) as i64);
        let product = rational::int((stats.c0 * stats.c1) as i64);
        let alb4 = alb4_value(&rel, &alb2_to_scheme(&rel).unwrap()).unwrap().value_squared;
        prop_assert!(alb4 <= ceiling);
        prop_assert!(alb4 <= product);
    }
}
