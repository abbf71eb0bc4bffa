mod common;

use common::{random_relation, ratio, relation_counts};
use qadv_core::adversary::RelationInstance;
use qadv_core::instances::{
    gen_bipartiteness, gen_graph_matching, gen_invert_permutation_relation, Mode,
};
use qadv_core::verifier::{verify_conversion, Verdict};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn conversion_is_exact_on_seeded_random_relations() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..100 {
        let (f, pairs) = random_relation(&mut rng, 3);
        let mut rel = RelationInstance::from_table(&f, &pairs, false).unwrap();
        if case % 2 == 1 {
            rel = rel.transpose();
        }
        let report = verify_conversion(&rel).unwrap();
        assert_eq!(report.verdict, Verdict::Pass, "case {case}");
        let (m, mp, _, _, lmax) = relation_counts(&pairs, 3);
        assert_eq!(report.alb2_squared, ratio(m * mp, lmax), "case {case}");
    }
}

#[test]
fn conversion_is_exact_on_constructed_relations() {
    let mut relations = vec![
        gen_bipartiteness(6, Mode::Explicit).unwrap(),
        gen_bipartiteness(8, Mode::Explicit).unwrap(),
        gen_graph_matching(6, Mode::Explicit).unwrap(),
    ];
    for n in [4, 6, 8] {
        relations.push(gen_invert_permutation_relation(n).unwrap());
    }
    for inst in relations {
        let rel = inst
            .relation
            .as_ref()
            .expect("explicit mode materializes the relation");
        let report = verify_conversion(rel).unwrap();
        assert_eq!(report.verdict, Verdict::Pass, "{} n={}", inst.name, inst.n);
        assert_eq!(report.alb2_squared, inst.bound().value_squared);
    }
}
