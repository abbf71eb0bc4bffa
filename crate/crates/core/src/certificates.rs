//! Certificate complexity `C(f,x)`, `C0`, `C1`, `C-`, certificate
//! intersection complexity `CI(f)`, and `Gamma(f)` for symmetric functions.
//!
//! A certificate for a defined input `x` is a set of positions whose values
//! force `f(x)` on every defined input agreeing with `x` there. For partial
//! functions only defined inputs are quantified over.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{Map, Value as Json};

use crate::function::{FunctionTable, InputWord, Value};
use crate::{Error, Result};

/// Sorted, deduplicated set of 0-based positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PositionSet(Vec<usize>);

impl PositionSet {
    pub fn new(mut positions: Vec<usize>) -> Self {
        positions.sort_unstable();
        positions.dedup();
        PositionSet(positions)
    }

    pub fn empty() -> Self {
        PositionSet(Vec::new())
    }

    pub fn full(n: usize) -> Self {
        PositionSet((0..n).collect())
    }

    /// From 1-based positions as they appear in documents.
    pub fn from_one_based(positions: &[usize]) -> Result<Self> {
        if positions.contains(&0) {
            return Err(Error::InvalidParameter("positions are 1-based".into()));
        }
        Ok(Self::new(positions.iter().map(|p| p - 1).collect()))
    }

    pub fn from_mask(mask: u32) -> Self {
        PositionSet((0..32).filter(|i| mask >> i & 1 == 1).collect())
    }

    pub fn mask(&self) -> Option<u32> {
        self.0
            .iter()
            .try_fold(0u32, |acc, &p| (p < 32).then(|| acc | 1 << p))
    }

    pub fn positions(&self) -> &[usize] {
        &self.0
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|p| p + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, p: usize) -> bool {
        self.0.binary_search(&p).is_ok()
    }

    pub fn union(&self, other: &PositionSet) -> PositionSet {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        PositionSet::new(v)
    }

    pub fn intersection_len(&self, other: &PositionSet) -> usize {
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }
}

impl fmt::Display for PositionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.one_based().iter().map(|p| p.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// One certificate set per defined input, keyed by input index.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CertificateAssignment {
    pub sets: BTreeMap<usize, PositionSet>,
}

impl CertificateAssignment {
    pub fn get(&self, index: usize) -> Option<&PositionSet> {
        self.sets.get(&index)
    }

    pub fn to_json(&self) -> Json {
        let map: Map<String, Json> = self
            .sets
            .iter()
            .map(|(i, s)| (i.to_string(), Json::from(s.one_based())))
            .collect();
        Json::Object(map)
    }

    pub fn from_json(doc: &Json) -> Result<Self> {
        let bad = |m: &str| Error::InvalidParameter(format!("certificate assignment: {m}"));
        let obj = doc.as_object().ok_or_else(|| bad("expected an object"))?;
        let mut sets = BTreeMap::new();
        for (key, val) in obj {
            let index: usize = key.parse().map_err(|_| bad("non-numeric key"))?;
            let arr = val
                .as_array()
                .ok_or_else(|| bad("expected position arrays"))?;
            let positions = arr
                .iter()
                .map(|p| {
                    p.as_u64()
                        .map(|p| p as usize)
                        .ok_or_else(|| bad("bad position"))
                })
                .collect::<Result<Vec<_>>>()?;
            sets.insert(index, PositionSet::from_one_based(&positions)?);
        }
        Ok(CertificateAssignment { sets })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CertStats {
    pub c0: usize,
    pub c1: usize,
    pub c: usize,
    pub c_minus: usize,
}

impl CertStats {
    pub fn new(c0: usize, c1: usize) -> Self {
        CertStats {
            c0,
            c1,
            c: c0.max(c1),
            c_minus: c0.min(c1),
        }
    }
}

/// Lexicographic `r`-subsets of `0..n`.
pub(crate) fn combinations(n: usize, r: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut next = (r <= n).then(|| (0..r).collect::<Vec<_>>());
    std::iter::from_fn(move || {
        let current = next.take()?;
        let mut c = current.clone();
        let mut i = r;
        while i > 0 {
            i -= 1;
            if c[i] < n - r + i {
                c[i] += 1;
                for j in i + 1..r {
                    c[j] = c[j - 1] + 1;
                }
                next = Some(c);
                break;
            }
        }
        Some(current)
    })
}

/// Position masks ordered by size, then lexicographically.
fn masks_by_size(n: usize) -> impl Iterator<Item = u32> {
    (0..=n).flat_map(move |r| combinations(n, r).map(|c| c.iter().fold(0u32, |m, &p| m | 1 << p)))
}

fn require_defined(f: &FunctionTable, x: &InputWord) -> Result<(usize, Value)> {
    let index = f.index_of(x)?;
    match f.value_at(index) {
        Value::Undefined => Err(Error::UndefinedInput(index)),
        v => Ok((index, v)),
    }
}

/// Digit extraction for table indices.
struct Digits {
    powers: Vec<usize>,
    alphabet: usize,
}

impl Digits {
    fn new(f: &FunctionTable) -> Self {
        let powers = (0..f.n_vars())
            .map(|j| f.alphabet().pow(j as u32))
            .collect();
        Digits {
            powers,
            alphabet: f.alphabet(),
        }
    }

    fn digit(&self, index: usize, position: usize) -> usize {
        index / self.powers[position] % self.alphabet
    }

    /// The index with every position outside `mask` zeroed.
    fn project(&self, index: usize, mask: u32) -> usize {
        let mut key = 0;
        let mut m = mask;
        while m != 0 {
            let p = m.trailing_zeros() as usize;
            key += self.digit(index, p) * self.powers[p];
            m &= m - 1;
        }
        key
    }
}

/// True iff every defined `y` agreeing with `x` on `s` has `f(y) = f(x)`.
pub fn certificate_check(f: &FunctionTable, x: &InputWord, s: &PositionSet) -> Result<bool> {
    let (index, value) = require_defined(f, x)?;
    if let Some(&p) = s.positions().iter().find(|&&p| p >= f.n_vars()) {
        return Err(Error::InvalidParameter(format!(
            "position {} out of range",
            p + 1
        )));
    }
    let digits = Digits::new(f);
    let fixed: Vec<(usize, usize)> = s
        .positions()
        .iter()
        .map(|&p| (p, digits.digit(index, p)))
        .collect();
    Ok(f.values().iter().enumerate().all(|(y, &vy)| {
        !vy.is_defined() || vy == value || fixed.iter().any(|&(p, d)| digits.digit(y, p) != d)
    }))
}

/// A smallest certificate for `x`, ties broken by the lexicographically
/// smallest position list.
pub fn min_certificate(f: &FunctionTable, x: &InputWord) -> Result<(usize, PositionSet)> {
    require_defined(f, x)?;
    for r in 0..=f.n_vars() {
        for c in combinations(f.n_vars(), r) {
            let s = PositionSet::new(c);
            if certificate_check(f, x, &s)? {
                return Ok((r, s));
            }
        }
    }
    unreachable!("the full position set certifies every defined input")
}

/// Evaluates "does `mask` certify each defined input" one mask at a time by
/// bucketing defined inputs on their projection.
struct CertifyScan<'a> {
    f: &'a FunctionTable,
    digits: Digits,
    defined: Vec<usize>,
    flags: Vec<u8>,
    touched: Vec<usize>,
}

impl<'a> CertifyScan<'a> {
    fn new(f: &'a FunctionTable) -> Result<Self> {
        if f.n_vars() > 24 {
            return Err(Error::InvalidParameter("too many positions".into()));
        }
        Ok(CertifyScan {
            f,
            digits: Digits::new(f),
            defined: f.defined_indices(),
            flags: vec![0; f.len()],
            touched: Vec::new(),
        })
    }

    fn bit(v: Value) -> u8 {
        match v {
            Value::Zero => 1,
            Value::One => 2,
            Value::Undefined => 0,
        }
    }

    /// Calls `certified(i)` for every defined input `i` certified by `mask`.
    fn scan(&mut self, mask: u32, mut certified: impl FnMut(usize)) {
        for &k in &self.touched {
            self.flags[k] = 0;
        }
        self.touched.clear();
        for &i in &self.defined {
            let key = self.digits.project(i, mask);
            if self.flags[key] == 0 {
                self.touched.push(key);
            }
            self.flags[key] |= Self::bit(self.f.value_at(i));
        }
        for &i in &self.defined {
            let key = self.digits.project(i, mask);
            if self.flags[key] != 3 {
                certified(i);
            }
        }
    }

    /// Restricted scan: only the listed inputs are reported.
    fn certifies_each(&mut self, mask: u32, inputs: &[usize]) -> Vec<bool> {
        let mut ok = vec![false; self.f.len()];
        self.scan(mask, |i| ok[i] = true);
        inputs.iter().map(|&i| ok[i]).collect()
    }
}

/// `C(f,x)` for every defined input (undefined inputs get `None`).
pub fn certificate_sizes(f: &FunctionTable) -> Result<Vec<Option<usize>>> {
    let mut scan = CertifyScan::new(f)?;
    let mut sizes = vec![None; f.len()];
    let mut remaining = scan.defined.len();
    for mask in masks_by_size(f.n_vars()) {
        if remaining == 0 {
            break;
        }
        let size = mask.count_ones() as usize;
        scan.scan(mask, |i| {
            if sizes[i].is_none() {
                sizes[i] = Some(size);
                remaining -= 1;
            }
        });
    }
    Ok(sizes)
}

pub fn cert_stats(f: &FunctionTable) -> Result<CertStats> {
    let sizes = certificate_sizes(f)?;
    let max_for = |b: Value| {
        sizes
            .iter()
            .enumerate()
            .filter(|(i, _)| f.value_at(*i) == b)
            .filter_map(|(_, s)| *s)
            .max()
            .unwrap_or(0)
    };
    Ok(CertStats::new(max_for(Value::Zero), max_for(Value::One)))
}

/// Inclusion-minimal certificate masks for every defined input.
pub fn minimal_certificates(f: &FunctionTable) -> Result<BTreeMap<usize, Vec<u32>>> {
    let mut scan = CertifyScan::new(f)?;
    let mut minimal: BTreeMap<usize, Vec<u32>> =
        scan.defined.iter().map(|&i| (i, Vec::new())).collect();
    for mask in masks_by_size(f.n_vars()) {
        scan.scan(mask, |i| {
            let found = minimal.get_mut(&i).expect("defined input");
            if !found.iter().any(|&m| m & !mask == 0) {
                found.push(mask);
            }
        });
    }
    Ok(minimal)
}

/// Branch-node budget for [`ci_exact`].
pub const CI_NODE_CAP: u64 = 10_000_000;

fn require_two_sided_total(f: &FunctionTable) -> Result<()> {
    if !f.is_total() {
        return Err(Error::PartialFunction);
    }
    if !f.has_both_values() {
        return Err(Error::ConstantFunction);
    }
    Ok(())
}

/// Exact `CI(f)` by branch and bound over inclusion-minimal certificates.
pub fn ci_exact(f: &FunctionTable) -> Result<(usize, CertificateAssignment)> {
    ci_exact_with_cap(f, CI_NODE_CAP)
}

pub fn ci_exact_with_cap(
    f: &FunctionTable,
    node_cap: u64,
) -> Result<(usize, CertificateAssignment)> {
    require_two_sided_total(f)?;
    let minimal = minimal_certificates(f)?;
    let mut order: Vec<(usize, Vec<u32>)> = minimal.into_iter().collect();
    order.sort_by_key(|(i, opts)| (opts.len(), *i));

    let mut search = CiSearch {
        f,
        order: &order,
        chosen: vec![0; order.len()],
        best: usize::MAX,
        best_choice: Vec::new(),
        nodes: 0,
        node_cap,
    };
    search.descend(0, 0)?;
    let sets = order
        .iter()
        .zip(&search.best_choice)
        .map(|((i, _), &m)| (*i, PositionSet::from_mask(m)))
        .collect();
    Ok((search.best, CertificateAssignment { sets }))
}

struct CiSearch<'a> {
    f: &'a FunctionTable,
    order: &'a [(usize, Vec<u32>)],
    chosen: Vec<u32>,
    best: usize,
    best_choice: Vec<u32>,
    nodes: u64,
    node_cap: u64,
}

impl CiSearch<'_> {
    fn descend(&mut self, depth: usize, running: usize) -> Result<()> {
        // any 0-certificate meets any 1-certificate of a total function,
        // so 1 cannot be beaten
        if self.best <= 1.max(running) {
            return Ok(());
        }
        if depth == self.order.len() {
            self.best = running;
            self.best_choice = self.chosen.clone();
            return Ok(());
        }
        let (input, options) = &self.order[depth];
        let value = self.f.value_at(*input);
        for &mask in options {
            self.nodes += 1;
            if self.nodes > self.node_cap {
                return Err(Error::CapExceeded(format!(
                    "CI search exceeded {} branch nodes",
                    self.node_cap
                )));
            }
            let worst = (0..depth)
                .filter(|&d| self.f.value_at(self.order[d].0) != value)
                .map(|d| (self.chosen[d] & mask).count_ones() as usize)
                .max()
                .unwrap_or(0)
                .max(running);
            if worst >= self.best {
                continue;
            }
            self.chosen[depth] = mask;
            self.descend(depth + 1, worst)?;
        }
        Ok(())
    }
}

/// `max |CS_x ∩ CS_y|` over oppositely valued inputs, after checking every
/// set is a certificate.
pub fn ci_upper(f: &FunctionTable, assignment: &CertificateAssignment) -> Result<usize> {
    require_two_sided_total(f)?;
    let mut scan = CertifyScan::new(f)?;
    // group inputs by their set so each distinct set is scanned once
    let mut by_mask: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for i in 0..f.len() {
        let set = assignment.get(i).ok_or(Error::InvalidCertificate(i))?;
        if set.positions().iter().any(|&p| p >= f.n_vars()) {
            return Err(Error::InvalidCertificate(i));
        }
        by_mask
            .entry(set.mask().ok_or(Error::InvalidCertificate(i))?)
            .or_default()
            .push(i);
    }
    let mut zero_masks = Vec::new();
    let mut one_masks = Vec::new();
    for (&mask, inputs) in &by_mask {
        let ok = scan.certifies_each(mask, inputs);
        if let Some(pos) = ok.iter().position(|b| !b) {
            return Err(Error::InvalidCertificate(inputs[pos]));
        }
        if inputs.iter().any(|&i| f.value_at(i) == Value::Zero) {
            zero_masks.push(mask);
        }
        if inputs.iter().any(|&i| f.value_at(i) == Value::One) {
            one_masks.push(mask);
        }
    }
    Ok(zero_masks
        .iter()
        .flat_map(|a| one_masks.iter().map(move |b| (a & b).count_ones() as usize))
        .max()
        .unwrap_or(0))
}

/// Value of a Boolean symmetric function at each Hamming weight `0..=N`.
pub fn symmetric_levels(f: &FunctionTable) -> Result<Vec<bool>> {
    if !f.is_boolean() {
        return Err(Error::InvalidParameter(
            "symmetric functions need k = 2".into(),
        ));
    }
    if !f.is_total() {
        return Err(Error::PartialFunction);
    }
    let mut levels: Vec<Option<bool>> = vec![None; f.n_vars() + 1];
    for i in 0..f.len() {
        let weight = i.count_ones() as usize;
        let v = f.value_at(i) == Value::One;
        match levels[weight] {
            None => levels[weight] = Some(v),
            Some(prev) if prev != v => return Err(Error::NotSymmetric),
            _ => {}
        }
    }
    Ok(levels
        .into_iter()
        .map(|l| l.expect("every weight occurs"))
        .collect())
}

/// `Gamma(f) = min |2t - N + 1|` over levels with `f_t != f_{t+1}`.
pub fn gamma_of_levels(levels: &[bool]) -> Result<usize> {
    let n = levels.len() as i64 - 1;
    (0..n as usize)
        .filter(|&t| levels[t] != levels[t + 1])
        .map(|t| (2 * t as i64 - n + 1).unsigned_abs() as usize)
        .min()
        .ok_or(Error::ConstantFunction)
}

pub fn gamma_symmetric(f: &FunctionTable) -> Result<usize> {
    gamma_of_levels(&symmetric_levels(f)?)
}

/// Certificate statistics of a symmetric function from its level values.
///
/// For an input of weight `w`, fixing `a` ones and `b` zeros leaves every
/// weight in `[a, N - b]` reachable, so `C(f,x)` is the least `a + b` with
/// `a <= w`, `b <= N - w` and `f` constant on `[a, N - b]`.
pub fn symmetric_cert_stats(levels: &[bool]) -> CertStats {
    let n = levels.len() - 1;
    let mut worst = [0usize; 2];
    let mut seen = [false; 2];
    for w in 0..=n {
        let mut best = n;
        for a in 0..=w {
            for b in 0..=n - w {
                if a + b < best && levels[a..=n - b].iter().all(|&v| v == levels[w]) {
                    best = a + b;
                }
            }
        }
        let side = levels[w] as usize;
        seen[side] = true;
        worst[side] = worst[side].max(best);
    }
    CertStats::new(
        if seen[0] { worst[0] } else { 0 },
        if seen[1] { worst[1] } else { 0 },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(n: usize, s: &str) -> FunctionTable {
        FunctionTable::parse_tt(&format!("n={n} k=2\n{s}\n")).unwrap()
    }

    fn w(s: &[u32]) -> InputWord {
        InputWord::new(s.to_vec())
    }

    fn ps(one_based: &[usize]) -> PositionSet {
        PositionSet::from_one_based(one_based).unwrap()
    }

    #[test]
    fn combinations_are_lexicographic() {
        let c: Vec<_> = combinations(4, 2).collect();
        assert_eq!(
            c,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(combinations(3, 0).count(), 1);
        assert_eq!(combinations(2, 3).count(), 0);
    }

    #[test]
    fn or2_certificate_checks() {
        let or2 = table(2, "0111");
        assert!(certificate_check(&or2, &w(&[0, 0]), &ps(&[1, 2])).unwrap());
        assert!(!certificate_check(&or2, &w(&[0, 0]), &ps(&[1])).unwrap());
        assert!(certificate_check(&or2, &w(&[1, 0]), &ps(&[1])).unwrap());
    }

    #[test]
    fn min_certificates() {
        let zero3 = table(3, "00000000");
        assert_eq!(
            min_certificate(&zero3, &w(&[1, 0, 1])).unwrap(),
            (0, PositionSet::empty())
        );
        let or2 = table(2, "0111");
        assert_eq!(min_certificate(&or2, &w(&[0, 1])).unwrap(), (1, ps(&[2])));
        let parity3 = table(3, "01101001");
        for i in 0..8 {
            assert_eq!(
                min_certificate(&parity3, &parity3.word(i)).unwrap(),
                (3, ps(&[1, 2, 3]))
            );
        }
    }

    #[test]
    fn undefined_inputs_are_rejected() {
        let p = table(2, "01*1");
        assert!(matches!(
            certificate_check(&p, &w(&[0, 1]), &ps(&[1])),
            Err(Error::UndefinedInput(2))
        ));
        assert!(matches!(
            min_certificate(&p, &w(&[0, 1])),
            Err(Error::UndefinedInput(2))
        ));
    }

    #[test]
    fn partial_functions_quantify_over_defined_inputs() {
        // f(0,0)=0, f(1,0)=1, f(0,1)=*, f(1,1)=1: position 1 alone certifies (0,0)
        let p = table(2, "01*1");
        assert!(certificate_check(&p, &w(&[0, 0]), &ps(&[1])).unwrap());
        assert_eq!(cert_stats(&p).unwrap(), CertStats::new(1, 1));
    }

    #[test]
    fn or2_stats_and_ci() {
        let or2 = table(2, "0111");
        assert_eq!(
            cert_stats(&or2).unwrap(),
            CertStats {
                c0: 2,
                c1: 1,
                c: 2,
                c_minus: 1
            }
        );
        let (ci, witness) = ci_exact(&or2).unwrap();
        assert_eq!(ci, 1);
        assert_eq!(ci_upper(&or2, &witness).unwrap(), 1);
    }

    #[test]
    fn parity2_ci_is_two() {
        let parity2 = table(2, "0110");
        assert_eq!(ci_exact(&parity2).unwrap().0, 2);
        let full = CertificateAssignment {
            sets: (0..4).map(|i| (i, ps(&[1, 2]))).collect(),
        };
        assert_eq!(ci_upper(&parity2, &full).unwrap(), 2);
    }

    #[test]
    fn ci_upper_or2_hand_assignment() {
        let or2 = table(2, "0111");
        // indices: (0,0)=0, (1,0)=1, (0,1)=2, (1,1)=3
        let a = CertificateAssignment {
            sets: [
                (0, ps(&[1, 2])),
                (2, ps(&[2])),
                (1, ps(&[1])),
                (3, ps(&[1])),
            ]
            .into_iter()
            .collect(),
        };
        assert_eq!(ci_upper(&or2, &a).unwrap(), 1);
        let mut bad = a.clone();
        bad.sets.insert(0, ps(&[1]));
        assert!(matches!(
            ci_upper(&or2, &bad),
            Err(Error::InvalidCertificate(0))
        ));
    }

    #[test]
    fn ci_rejects_constants_and_caps() {
        assert!(matches!(
            ci_exact(&table(2, "0000")),
            Err(Error::ConstantFunction)
        ));
        assert!(matches!(
            ci_exact(&table(2, "01*1")),
            Err(Error::PartialFunction)
        ));
        let maj3 = table(3, "00010111");
        assert!(matches!(
            ci_exact_with_cap(&maj3, 3),
            Err(Error::CapExceeded(_))
        ));
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_symmetric(&table(3, "01111111")).unwrap(), 2);
        assert_eq!(gamma_symmetric(&table(3, "01101001")).unwrap(), 0);
        assert_eq!(gamma_symmetric(&table(3, "00010111")).unwrap(), 0);
        assert!(matches!(
            gamma_symmetric(&table(2, "0010")),
            Err(Error::NotSymmetric)
        ));
        assert!(matches!(
            gamma_symmetric(&table(2, "1111")),
            Err(Error::ConstantFunction)
        ));
    }

    #[test]
    fn assignment_json_round_trip() {
        let a = CertificateAssignment {
            sets: [(0, ps(&[1, 2])), (10, ps(&[3]))].into_iter().collect(),
        };
        let doc = a.to_json();
        assert_eq!(doc.to_string(), r#"{"0":[1,2],"10":[3]}"#);
        assert_eq!(CertificateAssignment::from_json(&doc).unwrap(), a);
    }
}
