use serde_json::json;

use super::named::{gen_named, permutation_marker, permutations, NamedFunction};
use super::{Checks, CountedInstance, Mode};
use crate::adversary::{alb2_bound, RelationInstance, Witness};
use crate::function::InputWord;
use crate::{Error, Result};

/// Invert-a-Permutation: every permutation with the marker (symbol 0) at
/// an odd position is related to each transposition moving the marker to
/// an even position.
pub fn gen_invert_permutation_relation(n: usize) -> Result<CountedInstance> {
    if n % 2 == 1 || !(4..=8).contains(&n) {
        return Err(Error::InvalidParameter(format!(
            "n must be even and in 4..=8, got {n}"
        )));
    }
    let f = gen_named(NamedFunction::InvertPermutation, n, n)?;
    let mut pairs = Vec::new();
    for sigma in permutations(n) {
        let p = sigma
            .iter()
            .position(|&s| s == 0)
            .expect("a permutation holds 0");
        if (p + 1) % 2 == 0 {
            continue;
        }
        for q in (0..n).filter(|q| q % 2 != p % 2) {
            let mut tau = sigma.clone();
            tau.swap(p, q);
            pairs.push((InputWord::new(sigma.clone()), InputWord::new(tau)));
        }
    }
    let rel = RelationInstance::from_words(n, n, pairs)?;
    rel.check_against(&f)?;
    let mut checks = Checks::default();
    checks.record(
        "pairs_are_marker_transpositions",
        rel.len() as u64,
        rel.pairs().iter().all(|pr| {
            let (x, y) = (&rel.xs()[pr.x], &rel.ys()[pr.y]);
            pr.diff.len() == 2
                && permutation_marker(x).is_some_and(|p| p % 2 == 1)
                && permutation_marker(y).is_some_and(|p| p % 2 == 0)
        }),
    )?;
    let Witness::LMax { m, m_prime, l_max } = alb2_bound(&rel)?.witness else {
        unreachable!("alb2 reports l_max")
    };
    let mut inst =
        CountedInstance::new("invert_permutation", n, Mode::Explicit, (m, m_prime, l_max));
    inst.extra.insert("x_count".into(), json!(rel.xs().len()));
    inst.extra.insert("y_count".into(), json!(rel.ys().len()));
    inst.extra.insert("pairs".into(), json!(rel.len()));
    inst.representatives = vec!["all permutations".into()];
    inst.checks = checks.0;
    inst.relation = Some(rel);
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n4_counts() {
        let inst = gen_invert_permutation_relation(4).unwrap();
        assert_eq!((inst.m, inst.m_prime, inst.l_max), (2, 2, 2));
        assert_eq!(inst.relation.unwrap().xs().len(), 12);
    }

    #[test]
    fn range_errors() {
        assert!(gen_invert_permutation_relation(5).is_err());
        assert!(gen_invert_permutation_relation(10).is_err());
    }
}
