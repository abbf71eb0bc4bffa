//! Hamiltonian cycles against pairs of odd cycles on `n` labeled vertices.
//!
//! `X` holds every graph that is a single `n`-cycle, `Y` every graph that is
//! two vertex-disjoint odd cycles with lengths in `[n/3, 2n/3]`. A cycle
//! `c_0 .. c_{n-1}` is related to the graph obtained by removing the edges
//! `(c_a, c_{a+1})`, `(c_b, c_{b+1})` and adding `(c_{a+1}, c_b)`,
//! `(c_{b+1}, c_a)`, which splits it into cycles of lengths `b - a` and
//! `n - b + a`.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::json;

use super::graphs::{has_perfect_matching, is_bipartite, strands, GraphEncoding};
use super::{in_third_range, Checks, CountedInstance, Mode};
use crate::adversary::{alb2_bound, RelationInstance, Witness};
use crate::function::InputWord;
use crate::{Error, Result};

/// Largest `n` for which every Hamiltonian cycle is materialized.
pub const BIPARTITENESS_EXPLICIT_MAX_N: usize = 8;

const COUNTING_MAX_N: usize = 64;

fn check_n(n: usize, mode: Mode) -> Result<()> {
    if n % 2 == 1 || n < 6 {
        return Err(Error::InvalidParameter(format!(
            "n must be even and at least 6, got {n}"
        )));
    }
    let cap = match mode {
        Mode::Explicit => BIPARTITENESS_EXPLICIT_MAX_N,
        Mode::Counting => COUNTING_MAX_N,
    };
    if n > cap {
        return Err(Error::CapExceeded(format!(
            "{mode} mode supports n <= {cap}"
        )));
    }
    Ok(())
}

/// Sorted edge positions of a collection of cycles.
fn cycle_positions(enc: &GraphEncoding, cycles: &[&[usize]]) -> Vec<usize> {
    let mut out: Vec<usize> = cycles
        .iter()
        .flat_map(|c| (0..c.len()).map(move |i| (c[i], c[(i + 1) % c.len()])))
        .map(|(a, b)| enc.position(a, b).expect("vertices in range"))
        .collect();
    out.sort_unstable();
    out
}

fn positions_word(enc: &GraphEncoding, positions: &[usize]) -> InputWord {
    let mut bits = vec![0u32; enc.n_positions()];
    for &p in positions {
        bits[p] = 1;
    }
    InputWord::new(bits)
}

fn positions_edges(enc: &GraphEncoding, positions: &[usize]) -> Vec<(usize, usize)> {
    positions
        .iter()
        .map(|&p| enc.edge(p).expect("position in range"))
        .collect()
}

/// The two cycles produced by the swap at edge indices `a < b`, if allowed.
fn swap(c: &[usize], a: usize, b: usize) -> Option<[Vec<usize>; 2]> {
    let n = c.len();
    let d = b - a;
    if d.is_multiple_of(2) || !in_third_range(n, d) || !in_third_range(n, n - d) {
        return None;
    }
    let first = c[a + 1..=b].to_vec();
    let second = c[b + 1..].iter().chain(&c[..=a]).copied().collect();
    Some([first, second])
}

fn partners(c: &[usize]) -> Vec<[Vec<usize>; 2]> {
    let n = c.len();
    (0..n)
        .flat_map(|a| (a + 1..n).filter_map(move |b| swap(c, a, b)))
        .collect()
}

/// Every Hamiltonian cycle that one edge removal from each cycle and two
/// cross edges turn into `c1 ∪ c2`.
fn preimages(c1: &[usize], c2: &[usize]) -> Vec<Vec<usize>> {
    let rotated = |c: &[usize], start: usize| -> Vec<usize> {
        (0..c.len()).map(|t| c[(start + t) % c.len()]).collect()
    };
    let mut out = Vec::new();
    for i in 0..c1.len() {
        // walk c1 from c1[i+1] round to c1[i], dropping edge (c1[i], c1[i+1])
        let p1 = rotated(c1, i + 1);
        for j in 0..c2.len() {
            let p2 = rotated(c2, j + 1);
            out.push(p1.iter().chain(&p2).copied().collect());
            out.push(p1.iter().chain(p2.iter().rev()).copied().collect());
        }
    }
    out
}

/// All Hamiltonian cycles, as vertex sequences starting at 0 with
/// `c_1 < c_{n-1}`.
fn hamiltonian_cycles(n: usize) -> Vec<Vec<usize>> {
    fn extend(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            if cur[1] < cur[n - 1] {
                out.push(cur.clone());
            }
            return;
        }
        for v in 1..n {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                extend(n, cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    let mut used = vec![false; n];
    used[0] = true;
    extend(n, &mut vec![0], &mut used, &mut out);
    out
}

fn is_single_cycle(n: usize, edges: &[(usize, usize)]) -> bool {
    matches!(strands(n, edges).as_deref(), Some([s]) if s.is_cycle && s.vertices.len() == n)
}

fn is_two_odd_cycles(n: usize, edges: &[(usize, usize)]) -> bool {
    match strands(n, edges).as_deref() {
        Some([a, b]) => [a, b].iter().all(|s| {
            s.is_cycle && s.vertices.len() % 2 == 1 && in_third_range(n, s.vertices.len())
        }),
        _ => false,
    }
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Hamiltonian cycles (bipartite for even `n`) against pairs of odd cycles.
pub fn gen_bipartiteness(n: usize, mode: Mode) -> Result<CountedInstance> {
    check_n(n, mode)?;
    match mode {
        Mode::Explicit => explicit(n),
        Mode::Counting => counting(n),
    }
}

fn explicit(n: usize) -> Result<CountedInstance> {
    let enc = GraphEncoding::general(n);
    let cycles = hamiltonian_cycles(n);
    let mut pairs = Vec::new();
    for c in &cycles {
        let x = positions_word(&enc, &cycle_positions(&enc, &[c]));
        for [c1, c2] in partners(c) {
            pairs.push((
                x.clone(),
                positions_word(&enc, &cycle_positions(&enc, &[&c1, &c2])),
            ));
        }
    }
    let rel = RelationInstance::from_words(enc.n_positions(), 2, pairs)?;
    let mut checks = Checks::default();
    checks.record(
        "x_count",
        rel.xs().len() as u64,
        rel.xs().len() as u64 == factorial(n - 1) / 2,
    )?;
    let graphs = |side: &[InputWord]| -> Result<Vec<Vec<(usize, usize)>>> {
        side.iter().map(|w| enc.edges(w)).collect()
    };
    let xs = graphs(rel.xs())?;
    let ys = graphs(rel.ys())?;
    checks.record(
        "x_single_cycle_bipartite",
        xs.len() as u64,
        xs.iter()
            .all(|e| is_single_cycle(n, e) && is_bipartite(n, e)),
    )?;
    checks.record(
        "y_two_odd_cycles_not_bipartite",
        ys.len() as u64,
        ys.iter()
            .all(|e| is_two_odd_cycles(n, e) && !is_bipartite(n, e)),
    )?;
    checks.record(
        "pair_distance_4",
        rel.len() as u64,
        rel.pairs().iter().all(|p| p.diff.len() == 4),
    )?;
    let Witness::LMax { m, m_prime, l_max } = alb2_bound(&rel)?.witness else {
        unreachable!("alb2 reports l_max")
    };
    let mut inst = CountedInstance::new("bipartiteness", n, Mode::Explicit, (m, m_prime, l_max));
    inst.extra.insert("x_count".into(), json!(rel.xs().len()));
    inst.extra.insert("y_count".into(), json!(rel.ys().len()));
    inst.extra.insert("pairs".into(), json!(rel.len()));
    inst.representatives = vec!["all Hamiltonian cycles".into()];
    inst.checks = checks.0;
    inst.relation = Some(rel);
    Ok(inst)
}

/// Counts taken on the cycle `0, 1, .., n-1` and on one split per pair of
/// cycle lengths; every input is a relabeling of one of these.
fn counting(n: usize) -> Result<CountedInstance> {
    let enc = GraphEncoding::general(n);
    let mut checks = Checks::default();
    let rep: Vec<usize> = (0..n).collect();
    let x_pos = cycle_positions(&enc, &[&rep]);
    let x_edges = positions_edges(&enc, &x_pos);
    let ys: Vec<Vec<usize>> = partners(&rep)
        .iter()
        .map(|[a, b]| cycle_positions(&enc, &[a, b]))
        .collect();
    let m = ys.len() as u64;
    checks.record(
        "x_single_cycle_bipartite",
        1,
        is_single_cycle(n, &x_edges) && is_bipartite(n, &x_edges),
    )?;
    checks.record(
        "y_two_odd_cycles_not_bipartite",
        m,
        ys.iter().all(|y| {
            let e = positions_edges(&enc, y);
            is_two_odd_cycles(n, &e) && !is_bipartite(n, &e)
        }),
    )?;
    let diff = |a: &[usize], b: &[usize]| -> Vec<usize> {
        let (a, b): (BTreeSet<_>, BTreeSet<_>) = (a.iter().collect(), b.iter().collect());
        a.symmetric_difference(&b).map(|&&p| p).collect()
    };
    checks.record(
        "pair_distance_4",
        m,
        ys.iter().all(|y| diff(&x_pos, y).len() == 4),
    )?;

    // one representative per split p + q = n, p <= q
    let mut m_prime = u64::MAX;
    let mut reps = vec![format!("x: cycle 0..{}", n - 1)];
    for p in (1..=n / 2).filter(|&p| p % 2 == 1 && in_third_range(n, p) && in_third_range(n, n - p))
    {
        let (c1, c2): (Vec<usize>, Vec<usize>) = ((0..p).collect(), (p..n).collect());
        let y_pos = cycle_positions(&enc, &[&c1, &c2]);
        let pre = preimages(&c1, &c2);
        let consistent = pre.iter().all(|x| {
            let e = positions_edges(&enc, &cycle_positions(&enc, &[x]));
            is_single_cycle(n, &e)
                && partners(x)
                    .iter()
                    .any(|[a, b]| cycle_positions(&enc, &[a, b]) == y_pos)
        });
        checks.record(
            &format!("y_{p}_{}_preimages_related", n - p),
            pre.len() as u64,
            consistent,
        )?;
        m_prime = m_prime.min(pre.len() as u64);
        reps.push(format!("y: cycles of lengths {p} and {}", n - p));
    }

    // l_max over the pairs at the representative x
    let mut lx: BTreeMap<usize, u64> = BTreeMap::new();
    for y in &ys {
        for e in diff(&x_pos, y) {
            *lx.entry(e).or_default() += 1;
        }
    }
    let mut l_max = 0;
    for [c1, c2] in partners(&rep) {
        let y_pos = cycle_positions(&enc, &[&c1, &c2]);
        let mut ly: BTreeMap<usize, u64> = BTreeMap::new();
        for x in preimages(&c1, &c2) {
            for e in diff(&cycle_positions(&enc, &[&x]), &y_pos) {
                *ly.entry(e).or_default() += 1;
            }
        }
        for e in diff(&x_pos, &y_pos) {
            l_max = l_max.max(lx[&e] * ly[&e]);
        }
    }
    let mut inst = CountedInstance::new("bipartiteness", n, Mode::Counting, (m, m_prime, l_max));
    inst.extra
        .insert("x_count".into(), json!(factorial(n - 1) / 2));
    inst.representatives = reps;
    inst.checks = checks.0;
    Ok(inst)
}

/// The bipartiteness relation with its sides exchanged: pairs of odd
/// cycles (no perfect matching) against Hamiltonian cycles (one perfect
/// matching from alternate edges).
pub fn gen_graph_matching(n: usize, mode: Mode) -> Result<CountedInstance> {
    let base = gen_bipartiteness(n, mode)?;
    let enc = GraphEncoding::general(n);
    let mut checks = Checks::default();
    let mut inst = CountedInstance::new(
        "graph_matching",
        n,
        mode,
        (base.m_prime, base.m, base.l_max),
    );
    match mode {
        Mode::Explicit => {
            let rel = base
                .relation
                .expect("explicit mode materializes")
                .transpose();
            let xs = rel
                .xs()
                .iter()
                .map(|w| enc.edges(w))
                .collect::<Result<Vec<_>>>()?;
            let ys = rel
                .ys()
                .iter()
                .map(|w| enc.edges(w))
                .collect::<Result<Vec<_>>>()?;
            checks.record(
                "x_no_perfect_matching",
                xs.len() as u64,
                xs.iter().all(|e| !has_perfect_matching(n, e)),
            )?;
            checks.record(
                "y_perfect_matching",
                ys.len() as u64,
                ys.iter().all(|e| has_perfect_matching(n, e)),
            )?;
            let Witness::LMax { m, m_prime, l_max } = alb2_bound(&rel)?.witness else {
                unreachable!("alb2 reports l_max")
            };
            checks.record(
                "transposed_counts",
                1,
                (m, m_prime, l_max) == (inst.m, inst.m_prime, inst.l_max),
            )?;
            inst.extra.insert("x_count".into(), json!(rel.xs().len()));
            inst.extra.insert("y_count".into(), json!(rel.ys().len()));
            inst.relation = Some(rel);
        }
        Mode::Counting => {
            let rep: Vec<usize> = (0..n).collect();
            let ham = positions_edges(&enc, &cycle_positions(&enc, &[&rep]));
            checks.record("y_perfect_matching", 1, has_perfect_matching(n, &ham))?;
            let split = partners(&rep);
            checks.record(
                "x_no_perfect_matching",
                split.len() as u64,
                split.iter().all(|[a, b]| {
                    !has_perfect_matching(
                        n,
                        &positions_edges(&enc, &cycle_positions(&enc, &[a, b])),
                    )
                }),
            )?;
        }
    }
    inst.representatives = base.representatives;
    inst.checks = base.checks.into_iter().chain(checks.0).collect();
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_counts() {
        assert_eq!(hamiltonian_cycles(6).len(), 60);
        assert_eq!(hamiltonian_cycles(5).len(), 12);
    }

    #[test]
    fn swap_splits_into_two_cycles() {
        let c: Vec<usize> = (0..8).collect();
        let [a, b] = swap(&c, 0, 3).unwrap();
        assert_eq!(a, vec![1, 2, 3]);
        assert_eq!(b, vec![4, 5, 6, 7, 0]);
        assert!(swap(&c, 0, 2).is_none());
        assert_eq!(partners(&c).len(), 8);
    }

    #[test]
    fn preimage_count_is_twice_the_product() {
        assert_eq!(preimages(&[0, 1, 2], &[3, 4, 5, 6, 7]).len(), 30);
    }

    #[test]
    fn modes_agree_at_six() {
        let e = gen_bipartiteness(6, Mode::Explicit).unwrap();
        let c = gen_bipartiteness(6, Mode::Counting).unwrap();
        assert_eq!((e.m, e.m_prime, e.l_max), (c.m, c.m_prime, c.l_max));
        assert_eq!((e.m, e.m_prime), (3, 18));
    }

    #[test]
    fn parameter_errors() {
        assert!(gen_bipartiteness(7, Mode::Counting).is_err());
        assert!(gen_bipartiteness(4, Mode::Counting).is_err());
        assert!(matches!(
            gen_bipartiteness(10, Mode::Explicit),
            Err(Error::CapExceeded(_))
        ));
    }
}
