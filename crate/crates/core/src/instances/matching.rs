//! Bipartite graphs on `n + n` vertices that are two disjoint paths.
//!
//! Left vertex `i` is vertex `i`, right vertex `j` is vertex `n + j`.
//! With `a_i = τ(i)` on the left and `b_i = σ(i)` on the right, an
//! `X`-graph is the zigzag `a_0 b_0 a_1 .. b_{k-1} a_k` together with
//! `b_k a_{k+1} b_{k+1} .. a_{n-1} b_{n-1}`, for `k` in `[n/3, 2n/3]`: two
//! paths with odd vertex counts, so no perfect matching. A `Y`-graph is two
//! paths with even vertex counts `2a`, `2b`, both halves in `[n/3, 2n/3]`,
//! and has a perfect matching. A pair is related when `y` arises from `x`
//! by deleting an edge `(α1, β1)` of the first path and an edge `(α2, β2)`
//! of the second and adding `(α1, β2)`, `(α2, β1)`.
//!
//! Explicit mode enumerates neighborhoods of representatives by brute force
//! against membership predicates. Counting mode uses closed-form degree
//! counts and cut-index enumeration. Both are valid on every input since
//! each `X`- and `Y`-graph is a relabeling of a representative.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use super::graphs::{has_perfect_bipartite_matching, strands};
use super::{in_third_range, Checks, CountedInstance, Mode};
use crate::rational::{self, Q};
use crate::{Error, Result};

/// Largest `n` for explicit (brute-force neighborhood) mode.
pub const MATCHING_EXPLICIT_MAX_N: usize = 12;

const COUNTING_MAX_N: usize = 40;

/// Component layout of the `Y` side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YLayout {
    TwoComponents,
    /// Not constructible: two cuts and two joins on two paths always leave
    /// two components. Requesting it is an error.
    OneComponent,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingOptions {
    /// Random `(τ, σ, k)` samples to check.
    pub samples: u64,
    pub seed: u64,
    pub y_layout: YLayout,
}

impl Default for MatchingOptions {
    fn default() -> Self {
        MatchingOptions {
            samples: 1000,
            seed: 0,
            y_layout: YLayout::TwoComponents,
        }
    }
}

/// The admissible `k` (and half sizes), `n/3 <= k <= 2n/3`.
pub fn matching_k_range(n: usize) -> Vec<usize> {
    (1..n).filter(|&k| in_third_range(n, k)).collect()
}

/// Sorted edge positions `l n + r`.
type Graph = Vec<usize>;

struct Space {
    n: usize,
}

impl Space {
    fn edge(&self, u: usize, v: usize) -> usize {
        let n = self.n;
        let (l, r) = if u < n { (u, v - n) } else { (v, u - n) };
        debug_assert!(l < n && r < n);
        l * n + r
    }

    fn graph(&self, paths: &[&[usize]]) -> Graph {
        let mut g: Graph = paths
            .iter()
            .flat_map(|p| p.windows(2).map(|w| self.edge(w[0], w[1])))
            .collect();
        g.sort_unstable();
        g
    }

    /// Edges as vertex pairs `(left, n + right)`.
    fn vertex_edges(&self, g: &Graph) -> Vec<(usize, usize)> {
        g.iter()
            .map(|&p| (p / self.n, self.n + p % self.n))
            .collect()
    }

    fn lr_edges(&self, g: &Graph) -> Vec<(usize, usize)> {
        g.iter().map(|&p| (p / self.n, p % self.n)).collect()
    }

    /// The two paths of a graph that has exactly two components, both paths.
    fn two_paths(&self, g: &Graph) -> Option<[Vec<usize>; 2]> {
        match strands(2 * self.n, &self.vertex_edges(g)) {
            Some(s) if s.len() == 2 && s.iter().all(|c| !c.is_cycle) => {
                let mut it = s.into_iter().map(|c| c.vertices);
                Some([it.next()?, it.next()?])
            }
            _ => None,
        }
    }

    /// `Some(k)` iff `g` is an `X`-graph.
    fn x_param(&self, g: &Graph) -> Option<usize> {
        let paths = self.two_paths(g)?;
        let left = |v: &usize| *v < self.n;
        let mut k = None;
        let mut right_path = false;
        for p in &paths {
            let (first, last) = (p.first()?, p.last()?);
            if p.len() % 2 == 0 {
                return None;
            }
            if left(first) && left(last) {
                k = Some((p.len() - 1) / 2);
            } else if !left(first) && !left(last) {
                right_path = true;
            }
        }
        k.filter(|&k| right_path && in_third_range(self.n, k))
    }

    /// `Some((a, b))` iff `g` is a `Y`-graph with halves `a <= b`.
    fn y_param(&self, g: &Graph) -> Option<(usize, usize)> {
        let [p, q] = self.two_paths(g)?;
        if p.len() % 2 == 1 || q.len() % 2 == 1 {
            return None;
        }
        let (a, b) = (p.len() / 2, q.len() / 2);
        (in_third_range(self.n, a) && in_third_range(self.n, b)).then_some((a.min(b), a.max(b)))
    }

    /// Pair predicate: `x \ y` is one edge from each path of `x` and
    /// `y \ x` is the two cross edges.
    fn related(&self, x: &Graph, y: &Graph) -> bool {
        if self.x_param(x).is_none() || self.y_param(y).is_none() {
            return false;
        }
        let (xs, ys): (BTreeSet<_>, BTreeSet<_>) =
            (x.iter().copied().collect(), y.iter().copied().collect());
        let removed: Vec<usize> = xs.difference(&ys).copied().collect();
        let added: BTreeSet<usize> = ys.difference(&xs).copied().collect();
        let [e1, e2] = removed[..] else {
            return false;
        };
        let n = self.n;
        let cross: BTreeSet<usize> = [(e1 / n) * n + e2 % n, (e2 / n) * n + e1 % n].into();
        if added != cross {
            return false;
        }
        let paths = self.two_paths(x).expect("x is an X-graph");
        let owner = |e: usize| {
            paths
                .iter()
                .position(|p| p.windows(2).any(|w| self.edge(w[0], w[1]) == e))
        };
        owner(e1) != owner(e2)
    }

    /// Every graph obtained by deleting two disjoint edges of `g` and adding
    /// their cross edges.
    fn swaps(&self, g: &Graph) -> Vec<Graph> {
        let n = self.n;
        let mut out = Vec::new();
        for (s, &e1) in g.iter().enumerate() {
            for &e2 in &g[s + 1..] {
                let (l1, r1, l2, r2) = (e1 / n, e1 % n, e2 / n, e2 % n);
                if l1 == l2 || r1 == r2 {
                    continue;
                }
                let (c1, c2) = (l1 * n + r2, l2 * n + r1);
                if g.binary_search(&c1).is_ok() || g.binary_search(&c2).is_ok() {
                    continue;
                }
                let mut h: Graph = g
                    .iter()
                    .copied()
                    .filter(|&e| e != e1 && e != e2)
                    .chain([c1, c2])
                    .collect();
                h.sort_unstable();
                out.push(h);
            }
        }
        out
    }

    fn brute_partners(&self, x: &Graph) -> Vec<Graph> {
        self.swaps(x)
            .into_iter()
            .filter(|y| self.related(x, y))
            .collect()
    }

    fn brute_preimages(&self, y: &Graph) -> Vec<Graph> {
        self.swaps(y)
            .into_iter()
            .filter(|x| self.related(x, y))
            .collect()
    }

    /// Paths of an `X`-graph: `(τ, σ, k)` zigzag.
    fn x_graph(&self, tau: &[usize], sigma: &[usize], k: usize) -> (Vec<usize>, Vec<usize>) {
        let n = self.n;
        let mut p1 = Vec::with_capacity(2 * k + 1);
        for i in 0..k {
            p1.push(tau[i]);
            p1.push(n + sigma[i]);
        }
        p1.push(tau[k]);
        let mut p2 = vec![n + sigma[k]];
        for i in k + 1..n {
            p2.push(tau[i]);
            p2.push(n + sigma[i]);
        }
        (p1, p2)
    }

    /// Paths of a `Y`-graph with halves `a`, `n - a`, each starting on the left.
    fn y_graph(&self, tau: &[usize], sigma: &[usize], a: usize) -> (Vec<usize>, Vec<usize>) {
        let zig = |range: std::ops::Range<usize>| -> Vec<usize> {
            range.flat_map(|i| [tau[i], self.n + sigma[i]]).collect()
        };
        (zig(0..a), zig(a..self.n))
    }

    /// Cut-index enumeration of the partners of the `X`-graph with paths
    /// `p1` (both ends left) and `p2` (both ends right).
    fn cut_partners(&self, p1: &[usize], p2: &[usize]) -> Vec<Graph> {
        let x = self.graph(&[p1, p2]);
        let mut out = Vec::new();
        for t in 1..p1.len() {
            let e1 = if t % 2 == 0 { t } else { p1.len() - t };
            for s in 1..p2.len() {
                let e2 = if s % 2 == 0 { s } else { p2.len() - s };
                if !in_third_range(self.n, (e1 + e2) / 2) {
                    continue;
                }
                let (u1, v1) = (p1[t - 1], p1[t]);
                let (u2, v2) = (p2[s - 1], p2[s]);
                let (alpha1, beta1) = if u1 < self.n { (u1, v1) } else { (v1, u1) };
                let (alpha2, beta2) = if u2 < self.n { (u2, v2) } else { (v2, u2) };
                out.push(self.apply(
                    &x,
                    [self.edge(u1, v1), self.edge(u2, v2)],
                    [self.edge(alpha1, beta2), self.edge(alpha2, beta1)],
                ));
            }
        }
        out
    }

    /// Cut-index enumeration of the preimages of the `Y`-graph with paths
    /// `q1`, `q2`, each starting on the left: one path is cut into odd
    /// pieces, the other into even pieces, and the prefixes are rejoined.
    fn cut_preimages(&self, q1: &[usize], q2: &[usize]) -> Vec<Graph> {
        let y = self.graph(&[q1, q2]);
        let mut out = Vec::new();
        for (a, b) in [(q1, q2), (q2, q1)] {
            for t in (1..a.len()).step_by(2) {
                for s in (2..b.len().saturating_sub(1)).step_by(2) {
                    if !in_third_range(self.n, (t + s - 1) / 2) {
                        continue;
                    }
                    out.push(self.apply(
                        &y,
                        [self.edge(a[t - 1], a[t]), self.edge(b[s - 1], b[s])],
                        [self.edge(a[t - 1], b[s - 1]), self.edge(b[s], a[t])],
                    ));
                }
            }
        }
        out
    }

    fn apply(&self, g: &Graph, remove: [usize; 2], add: [usize; 2]) -> Graph {
        let mut h: Graph = g
            .iter()
            .copied()
            .filter(|e| !remove.contains(e))
            .chain(add)
            .collect();
        h.sort_unstable();
        h
    }

    /// Left-first orientation of the two paths of a `Y`-graph.
    fn oriented_paths(&self, y: &Graph) -> Option<[Vec<usize>; 2]> {
        let mut paths = self.two_paths(y)?;
        for p in &mut paths {
            if p[0] >= self.n {
                p.reverse();
            }
        }
        Some(paths)
    }

    fn has_pm(&self, g: &Graph) -> bool {
        has_perfect_bipartite_matching(self.n, &self.lr_edges(g))
    }
}

/// `m(k) = 4 #{1<=a<=k, 1<=b<=n-k-1 : a+b in K}`.
fn closed_form_m(n: usize, k: usize) -> u64 {
    let mut count = 0;
    for a in 1..=k {
        for b in 1..n - k {
            if in_third_range(n, a + b) {
                count += 4;
            }
        }
    }
    count
}

/// Preimage count of a `Y`-graph with halves `a`, `b`: sum over the path
/// cut into odd pieces of `#{t odd, s even interior : (t+s-1)/2 in K}`.
fn closed_form_m_prime(n: usize, a: usize, b: usize) -> u64 {
    let mut count = 0;
    for (odd, even) in [(a, b), (b, a)] {
        for t in (1..2 * odd).step_by(2) {
            for s in (2..2 * even - 1).step_by(2) {
                if in_third_range(n, (t + s - 1) / 2) {
                    count += 1;
                }
            }
        }
    }
    count
}

fn symmetric_difference(a: &Graph, b: &Graph) -> Vec<usize> {
    let (a, b): (BTreeSet<_>, BTreeSet<_>) = (a.iter().collect(), b.iter().collect());
    a.symmetric_difference(&b).map(|&&e| e).collect()
}

fn count_positions(center: &Graph, others: &[Graph]) -> BTreeMap<usize, u64> {
    let mut l = BTreeMap::new();
    for o in others {
        for e in symmetric_difference(center, o) {
            *l.entry(e).or_default() += 1;
        }
    }
    l
}

/// `Y` splits `(a, b)`, `a <= b`, both halves admissible.
fn splits(n: usize) -> Vec<(usize, usize)> {
    matching_k_range(n)
        .into_iter()
        .filter(|&a| 2 * a <= n && in_third_range(n, n - a))
        .map(|a| (a, n - a))
        .collect()
}

pub fn gen_bipartite_matching(n: usize, mode: Mode) -> Result<CountedInstance> {
    gen_bipartite_matching_with(n, mode, &MatchingOptions::default())
}

pub fn gen_bipartite_matching_with(
    n: usize,
    mode: Mode,
    opts: &MatchingOptions,
) -> Result<CountedInstance> {
    if n < 6 {
        return Err(Error::InvalidParameter(format!(
            "n must be at least 6, got {n}"
        )));
    }
    let cap = match mode {
        Mode::Explicit => MATCHING_EXPLICIT_MAX_N,
        Mode::Counting => COUNTING_MAX_N,
    };
    if n > cap {
        return Err(Error::CapExceeded(format!(
            "{mode} mode supports n <= {cap}"
        )));
    }
    if opts.y_layout == YLayout::OneComponent {
        return Err(Error::InvalidParameter(
            "a one-component Y side is not reachable: deleting one edge from each of two paths and adding \
             two edges always leaves two components"
                .into(),
        ));
    }
    let sp = Space { n };
    let id: Vec<usize> = (0..n).collect();
    let ks = matching_k_range(n);
    let mut checks = Checks::default();

    // representatives with their neighborhoods
    let x_reps: Vec<(usize, Graph, Vec<Graph>)> = ks
        .iter()
        .map(|&k| {
            let (p1, p2) = sp.x_graph(&id, &id, k);
            let x = sp.graph(&[&p1, &p2]);
            let partners = match mode {
                Mode::Explicit => sp.brute_partners(&x),
                Mode::Counting => sp.cut_partners(&p1, &p2),
            };
            (k, x, partners)
        })
        .collect();
    let y_reps: Vec<((usize, usize), Graph)> = splits(n)
        .into_iter()
        .map(|(a, b)| {
            let (q1, q2) = sp.y_graph(&id, &id, a);
            ((a, b), sp.graph(&[&q1, &q2]))
        })
        .collect();
    let preimages_of = |y: &Graph| -> Vec<Graph> {
        match mode {
            Mode::Explicit => sp.brute_preimages(y),
            Mode::Counting => {
                let [q1, q2] = sp.oriented_paths(y).expect("y is a Y-graph");
                sp.cut_preimages(&q1, &q2)
            }
        }
    };

    let (m, m_prime) = match mode {
        Mode::Explicit => (
            x_reps
                .iter()
                .map(|(_, _, p)| p.len() as u64)
                .min()
                .unwrap_or(0),
            y_reps
                .iter()
                .map(|(_, y)| preimages_of(y).len() as u64)
                .min()
                .unwrap_or(0),
        ),
        Mode::Counting => (
            ks.iter().map(|&k| closed_form_m(n, k)).min().unwrap_or(0),
            splits(n)
                .iter()
                .map(|&(a, b)| closed_form_m_prime(n, a, b))
                .min()
                .unwrap_or(0),
        ),
    };

    let all_partners: Vec<(&Graph, &Graph)> = x_reps
        .iter()
        .flat_map(|(_, x, ps)| ps.iter().map(move |y| (x, y)))
        .collect();
    checks.record(
        "x_representatives_no_perfect_matching",
        x_reps.len() as u64,
        x_reps
            .iter()
            .all(|(k, x, _)| sp.x_param(x) == Some(*k) && !sp.has_pm(x)),
    )?;
    checks.record(
        "y_representatives_perfect_matching",
        y_reps.len() as u64,
        y_reps
            .iter()
            .all(|(s, y)| sp.y_param(y) == Some(*s) && sp.has_pm(y)),
    )?;
    checks.record(
        "partners_perfect_matching",
        all_partners.len() as u64,
        all_partners
            .par_iter()
            .all(|(_, y)| sp.y_param(y).is_some() && sp.has_pm(y)),
    )?;
    checks.record(
        "pair_distance_4",
        all_partners.len() as u64,
        all_partners
            .par_iter()
            .all(|(x, y)| symmetric_difference(x, y).len() == 4 && sp.related(x, y)),
    )?;
    checks.record(
        "representative_degrees_match_closed_form",
        (x_reps.len() + y_reps.len()) as u64,
        x_reps
            .iter()
            .all(|(k, _, p)| p.len() as u64 == closed_form_m(n, *k))
            && y_reps
                .iter()
                .all(|((a, b), y)| preimages_of(y).len() as u64 == closed_form_m_prime(n, *a, *b)),
    )?;

    // l_max and the edge-role scheme over every pair at a representative x
    let scheme_n = rational::int(n as i64);
    let per_x: Vec<(u64, Q)> = x_reps
        .par_iter()
        .map(|(_, x, partners)| {
            let lx = count_positions(x, partners);
            let mut l_max = 0;
            for y in partners {
                let ly = count_positions(y, &preimages_of(y));
                for e in symmetric_difference(x, y) {
                    l_max = l_max.max(lx[&e] * ly[&e]);
                }
            }
            // u-hat is 1/n on deleted edges (those in x) and 1 on added ones
            let w = rational::int(partners.len() as i64);
            let ratio = lx
                .iter()
                .map(|(e, &l)| {
                    let u = if x.binary_search(e).is_ok() {
                        rational::int(l as i64) / &scheme_n
                    } else {
                        rational::int(l as i64)
                    };
                    &w / u
                })
                .min()
                .unwrap_or_else(rational::zero);
            (l_max, ratio)
        })
        .collect();
    let l_max = per_x.iter().map(|(l, _)| *l).max().unwrap_or(0);
    let x_ratio = per_x
        .into_iter()
        .map(|(_, r)| r)
        .min()
        .unwrap_or_else(rational::zero);
    let y_ratio = y_reps
        .iter()
        .map(|(_, y)| {
            let pre = preimages_of(y);
            let w = rational::int(pre.len() as i64);
            count_positions(y, &pre)
                .iter()
                .map(|(e, &l)| {
                    // v-hat is 1 on deleted edges (absent from y) and 1/n on added ones
                    let v = if y.binary_search(e).is_ok() {
                        rational::int(l as i64) / &scheme_n
                    } else {
                        rational::int(l as i64)
                    };
                    &w / v
                })
                .min()
                .unwrap_or_else(rational::zero)
        })
        .min()
        .unwrap_or_else(rational::zero);
    let scheme_sq = x_ratio * y_ratio / &scheme_n;
    checks.record("edge_role_scheme_positive", 1, !scheme_sq.is_zero())?;

    // seeded samples over random relabelings
    let samples: Vec<bool> = (0..opts.samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(s);
            let mut tau = id.clone();
            let mut sigma = id.clone();
            tau.shuffle(&mut rng);
            sigma.shuffle(&mut rng);
            let k = ks[rng.gen_range(0..ks.len())];
            let (p1, p2) = sp.x_graph(&tau, &sigma, k);
            let x = sp.graph(&[&p1, &p2]);
            let partners = sp.cut_partners(&p1, &p2);
            if sp.x_param(&x) != Some(k)
                || sp.has_pm(&x)
                || partners.len() as u64 != closed_form_m(n, k)
            {
                return false;
            }
            let y = &partners[rng.gen_range(0..partners.len())];
            let Some((a, b)) = sp.y_param(y) else {
                return false;
            };
            if !sp.has_pm(y) || !sp.related(&x, y) || symmetric_difference(&x, y).len() != 4 {
                return false;
            }
            let [q1, q2] = sp.oriented_paths(y).expect("y is a Y-graph");
            let pre = sp.cut_preimages(&q1, &q2);
            pre.len() as u64 == closed_form_m_prime(n, a, b) && pre.contains(&x)
        })
        .collect();
    checks.record(
        "sampled_x_no_pm_y_pm_uniform_degrees",
        opts.samples,
        samples.iter().all(|&b| b),
    )?;

    let mut inst = CountedInstance::new("bipartite_matching", n, mode, (m, m_prime, l_max));
    inst.representatives = ks
        .iter()
        .map(|k| format!("x: tau = sigma = identity, k = {k}"))
        .chain(
            splits(n)
                .iter()
                .map(|(a, b)| format!("y: tau = sigma = identity, halves {a} and {b}")),
        )
        .collect();
    inst.extra.insert(
        "edge_role_scheme_alb3_sq".into(),
        json!(rational::to_string(&scheme_sq)),
    );
    inst.extra
        .insert("edge_role_scheme_factor".into(), json!(n));
    inst.extra.insert("samples".into(), json!(opts.samples));
    inst.extra.insert("seed".into(), json!(opts.seed));
    inst.checks = checks.0;
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> MatchingOptions {
        MatchingOptions {
            samples: 50,
            ..MatchingOptions::default()
        }
    }

    #[test]
    fn representative_counts_at_six() {
        let inst = gen_bipartite_matching_with(6, Mode::Counting, &quick()).unwrap();
        assert_eq!((inst.m, inst.m_prime, inst.l_max), (12, 8, 12));
    }

    #[test]
    fn modes_agree() {
        for n in [6, 7, 9] {
            let e = gen_bipartite_matching_with(n, Mode::Explicit, &quick()).unwrap();
            let c = gen_bipartite_matching_with(n, Mode::Counting, &quick()).unwrap();
            assert_eq!(
                (e.m, e.m_prime, e.l_max),
                (c.m, c.m_prime, c.l_max),
                "n = {n}"
            );
            assert_eq!(
                e.extra["edge_role_scheme_alb3_sq"],
                c.extra["edge_role_scheme_alb3_sq"]
            );
        }
    }

    #[test]
    fn cut_and_brute_neighborhoods_coincide() {
        let sp = Space { n: 7 };
        let id: Vec<usize> = (0..7).collect();
        for k in matching_k_range(7) {
            let (p1, p2) = sp.x_graph(&id, &id, k);
            let x = sp.graph(&[&p1, &p2]);
            let mut cut = sp.cut_partners(&p1, &p2);
            let mut brute = sp.brute_partners(&x);
            cut.sort();
            brute.sort();
            assert_eq!(cut, brute);
            for y in &brute {
                let [q1, q2] = sp.oriented_paths(y).unwrap();
                let mut cut = sp.cut_preimages(&q1, &q2);
                let mut brute = sp.brute_preimages(y);
                cut.sort();
                brute.sort();
                assert_eq!(cut, brute);
            }
        }
    }

    #[test]
    fn one_component_layout_is_refused() {
        let opts = MatchingOptions {
            y_layout: YLayout::OneComponent,
            ..MatchingOptions::default()
        };
        assert!(matches!(
            gen_bipartite_matching_with(6, Mode::Counting, &opts),
            Err(Error::InvalidParameter(_))
        ));
    }
}
