use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde_json::{json, Value as Json};

use crate::function::{FunctionTable, InputWord, Value};
use crate::{Error, Result};

/// One related pair, with the positions where the two inputs differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pair {
    /// Index into [`RelationInstance::xs`].
    pub x: usize,
    /// Index into [`RelationInstance::ys`].
    pub y: usize,
    /// 0-based positions with `x_i != y_i`, ascending and never empty.
    pub diff: Vec<usize>,
}

/// Sets `X` (value 0), `Y` (value 1) and a relation `R ⊆ X × Y`.
///
/// `X` and `Y` are always the support of `R`: isolated inputs are dropped at
/// construction. Inputs are kept in index order and pairs in `(x, y)` order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationInstance {
    n_vars: usize,
    alphabet: usize,
    xs: Vec<InputWord>,
    ys: Vec<InputWord>,
    pairs: Vec<Pair>,
}

impl RelationInstance {
    /// Build from input words. The first word of each pair is the 0-input.
    pub fn from_words(
        n_vars: usize,
        alphabet: usize,
        pairs: Vec<(InputWord, InputWord)>,
    ) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::EmptyRelation);
        }
        for (x, y) in &pairs {
            for word in [x, y] {
                if word.len() != n_vars {
                    return Err(Error::WordLength {
                        expected: n_vars,
                        got: word.len(),
                    });
                }
                if let Some(p) = word.symbols().iter().position(|&s| s as usize >= alphabet) {
                    return Err(Error::SymbolOutOfRange {
                        position: p + 1,
                        symbol: word.symbols()[p],
                        alphabet,
                    });
                }
            }
            if x == y {
                return Err(Error::InvalidRelation(format!(
                    "pair {x} relates an input to itself"
                )));
            }
        }
        let mut xs: Vec<InputWord> = pairs.iter().map(|(x, _)| x.clone()).collect();
        let mut ys: Vec<InputWord> = pairs.iter().map(|(_, y)| y.clone()).collect();
        for side in [&mut xs, &mut ys] {
            side.sort_by(|a, b| a.index_cmp(b));
            side.dedup();
        }
        if xs
            .iter()
            .any(|x| ys.binary_search_by(|y| y.index_cmp(x)).is_ok())
        {
            return Err(Error::InvalidRelation(
                "an input appears on both sides".into(),
            ));
        }
        let find = |side: &[InputWord], w: &InputWord| {
            side.binary_search_by(|probe| probe.index_cmp(w))
                .expect("collected above")
        };
        let mut keyed: Vec<(usize, usize)> = pairs
            .iter()
            .map(|(x, y)| (find(&xs, x), find(&ys, y)))
            .collect();
        keyed.sort_unstable();
        keyed.dedup();
        let pairs = keyed
            .into_iter()
            .map(|(x, y)| Pair {
                x,
                y,
                diff: xs[x].diff_positions(&ys[y]),
            })
            .collect();
        Ok(RelationInstance {
            n_vars,
            alphabet,
            xs,
            ys,
            pairs,
        })
    }

    /// Build from table indices. Pairs are `(zero_input, one_input)` unless
    /// `swapped`, in which case they are `(one_input, zero_input)`.
    pub fn from_table(f: &FunctionTable, pairs: &[(usize, usize)], swapped: bool) -> Result<Self> {
        let mut words = Vec::with_capacity(pairs.len());
        for &(a, b) in pairs {
            let (x, y) = if swapped { (b, a) } else { (a, b) };
            for (i, want) in [(x, Value::Zero), (y, Value::One)] {
                if i >= f.len() {
                    return Err(Error::InvalidRelation(format!(
                        "input index {i} out of range"
                    )));
                }
                if f.value_at(i) != want {
                    return Err(Error::InvalidRelation(format!(
                        "input {i} has value {:?}, expected {want:?}",
                        f.value_at(i)
                    )));
                }
            }
            words.push((f.word(x), f.word(y)));
        }
        Self::from_words(f.n_vars(), f.alphabet(), words)
    }

    /// All of `f^{-1}(0) × f^{-1}(1)`.
    pub fn full(f: &FunctionTable) -> Result<Self> {
        let zeros = f.preimage(Value::Zero);
        let ones = f.preimage(Value::One);
        let pairs: Vec<_> = zeros
            .iter()
            .flat_map(|&x| ones.iter().map(move |&y| (x, y)))
            .collect();
        Self::from_table(f, &pairs, false)
    }

    /// Oppositely valued inputs differing in exactly one position.
    pub fn hamming_neighbors(f: &FunctionTable) -> Result<Self> {
        let mut pairs = Vec::new();
        for x in f.preimage(Value::Zero) {
            let word = f.word(x);
            for p in 0..f.n_vars() {
                for s in 0..f.alphabet() as u32 {
                    if s == word.0[p] {
                        continue;
                    }
                    let mut other = word.clone();
                    other.0[p] = s;
                    let y = f.index_of(&other)?;
                    if f.value_at(y) == Value::One {
                        pairs.push((x, y));
                    }
                }
            }
        }
        Self::from_table(f, &pairs, false)
    }

    /// Same pairs with the roles of `X` and `Y` exchanged.
    pub fn transpose(&self) -> Self {
        let mut pairs: Vec<Pair> = self
            .pairs
            .iter()
            .map(|p| Pair {
                x: p.y,
                y: p.x,
                diff: p.diff.clone(),
            })
            .collect();
        pairs.sort_by_key(|p| (p.x, p.y));
        RelationInstance {
            n_vars: self.n_vars,
            alphabet: self.alphabet,
            xs: self.ys.clone(),
            ys: self.xs.clone(),
            pairs,
        }
    }

    /// Keep only the listed pairs (by position in [`Self::pairs`]).
    pub fn subrelation(&self, keep: &[usize]) -> Result<Self> {
        let words = keep
            .iter()
            .map(|&k| {
                let p = &self.pairs[k];
                (self.xs[p.x].clone(), self.ys[p.y].clone())
            })
            .collect();
        Self::from_words(self.n_vars, self.alphabet, words)
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn xs(&self) -> &[InputWord] {
        &self.xs
    }

    pub fn ys(&self) -> &[InputWord] {
        &self.ys
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn x_degrees(&self) -> Vec<u64> {
        let mut d = vec![0; self.xs.len()];
        for p in &self.pairs {
            d[p.x] += 1;
        }
        d
    }

    pub fn y_degrees(&self) -> Vec<u64> {
        let mut d = vec![0; self.ys.len()];
        for p in &self.pairs {
            d[p.y] += 1;
        }
        d
    }

    /// `l_{x,i}` keyed by `(x, i)`; absent keys are zero.
    pub fn x_position_degrees(&self) -> HashMap<(usize, usize), u64> {
        let mut l = HashMap::new();
        for p in &self.pairs {
            for &i in &p.diff {
                *l.entry((p.x, i)).or_insert(0) += 1;
            }
        }
        l
    }

    pub fn y_position_degrees(&self) -> HashMap<(usize, usize), u64> {
        let mut l = HashMap::new();
        for p in &self.pairs {
            for &i in &p.diff {
                *l.entry((p.y, i)).or_insert(0) += 1;
            }
        }
        l
    }

    /// Check both sides against `f` (only possible when `f` is tabulated).
    pub fn check_against(&self, f: &FunctionTable) -> Result<()> {
        if f.n_vars() != self.n_vars || f.alphabet() != self.alphabet {
            return Err(Error::InvalidRelation(
                "relation and table shapes differ".into(),
            ));
        }
        for (side, want) in [(&self.xs, Value::Zero), (&self.ys, Value::One)] {
            for w in side {
                let got = f.eval(w)?;
                if got != want {
                    return Err(Error::InvalidRelation(format!(
                        "input {w} has value {got:?}, expected {want:?}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn x_index(&self, x: usize) -> Result<u64> {
        self.word_index(&self.xs[x])
    }

    pub fn y_index(&self, y: usize) -> Result<u64> {
        self.word_index(&self.ys[y])
    }

    fn word_index(&self, w: &InputWord) -> Result<u64> {
        w.index(self.alphabet)
            .and_then(|i| u64::try_from(i).ok())
            .ok_or_else(|| Error::InvalidRelation("input index does not fit 64 bits".into()))
    }

    /// `{"k":..,"n":..,"r":[[x,y],..],"x":[..],"y":[..]}` with table indices.
    pub fn to_json(&self) -> Result<Json> {
        let xs = (0..self.xs.len())
            .map(|i| self.x_index(i))
            .collect::<Result<Vec<_>>>()?;
        let ys = (0..self.ys.len())
            .map(|i| self.y_index(i))
            .collect::<Result<Vec<_>>>()?;
        let r: Vec<[u64; 2]> = self.pairs.iter().map(|p| [xs[p.x], ys[p.y]]).collect();
        Ok(json!({"n": self.n_vars, "k": self.alphabet, "x": xs, "y": ys, "r": r}))
    }

    /// Parse a relation document. The shape comes from `table` when given,
    /// otherwise from the document's `n` and `k` fields.
    pub fn from_json(doc: &Json, table: Option<&FunctionTable>) -> Result<Self> {
        let bad = |m: &str| Error::InvalidRelation(m.to_string());
        let field = |name: &str| doc.get(name).and_then(Json::as_u64).map(|v| v as usize);
        let (n_vars, alphabet) = match table {
            Some(f) => (f.n_vars(), f.alphabet()),
            None => (
                field("n").ok_or_else(|| bad("missing n (or supply a table)"))?,
                field("k").ok_or_else(|| bad("missing k (or supply a table)"))?,
            ),
        };
        if let (Some(f), Some(n), Some(k)) = (table, field("n"), field("k")) {
            if (n, k) != (f.n_vars(), f.alphabet()) {
                return Err(bad("document shape differs from the table"));
            }
        }
        let indices = |name: &str| -> Result<BTreeSet<u64>> {
            match doc.get(name) {
                None => Ok(BTreeSet::new()),
                Some(v) => v
                    .as_array()
                    .ok_or_else(|| bad("x/y must be arrays"))?
                    .iter()
                    .map(|e| e.as_u64().ok_or_else(|| bad("indices must be integers")))
                    .collect(),
            }
        };
        let xs = indices("x")?;
        let ys = indices("y")?;
        let r = doc
            .get("r")
            .and_then(Json::as_array)
            .ok_or_else(|| bad("missing r"))?;
        let decode = |i: u64| -> Result<InputWord> {
            let mut rest = i as u128;
            let symbols = (0..n_vars)
                .map(|_| {
                    let s = (rest % alphabet as u128) as u32;
                    rest /= alphabet as u128;
                    s
                })
                .collect();
            if rest != 0 {
                return Err(bad("index out of range"));
            }
            Ok(InputWord(symbols))
        };
        let mut words = Vec::with_capacity(r.len());
        for pair in r {
            let pair = pair
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| bad("pairs must be [x, y]"))?;
            let x = pair[0]
                .as_u64()
                .ok_or_else(|| bad("indices must be integers"))?;
            let y = pair[1]
                .as_u64()
                .ok_or_else(|| bad("indices must be integers"))?;
            if (!xs.is_empty() && !xs.contains(&x)) || (!ys.is_empty() && !ys.contains(&y)) {
                return Err(bad("pair uses an input outside x/y"));
            }
            words.push((decode(x)?, decode(y)?));
        }
        let rel = Self::from_words(n_vars, alphabet, words)?;
        if let Some(f) = table {
            rel.check_against(f)?;
        }
        Ok(rel)
    }

    /// Pair lookup by `(x, y)` position.
    pub fn pair_index(&self) -> BTreeMap<(usize, usize), usize> {
        self.pairs
            .iter()
            .enumerate()
            .map(|(k, p)| ((p.x, p.y), k))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn or2() -> FunctionTable {
        FunctionTable::parse_tt("n=2 k=2\n0111\n").unwrap()
    }

    #[test]
    fn from_table_orients_and_prunes() {
        let f = or2();
        let rel = RelationInstance::from_table(&f, &[(0, 1), (0, 2)], false).unwrap();
        assert_eq!(rel.xs().len(), 1);
        assert_eq!(rel.ys().len(), 2);
        let swapped = RelationInstance::from_table(&f, &[(1, 0), (2, 0)], true).unwrap();
        assert_eq!(rel, swapped);
        assert!(RelationInstance::from_table(&f, &[(1, 0)], false).is_err());
        assert!(matches!(
            RelationInstance::from_table(&f, &[], false),
            Err(Error::EmptyRelation)
        ));
    }

    #[test]
    fn json_round_trip() {
        let f = or2();
        let rel = RelationInstance::full(&f).unwrap();
        let doc = rel.to_json().unwrap();
        assert_eq!(
            doc.to_string(),
            r#"{"k":2,"n":2,"r":[[0,1],[0,2],[0,3]],"x":[0],"y":[1,2,3]}"#
        );
        assert_eq!(RelationInstance::from_json(&doc, None).unwrap(), rel);
        assert_eq!(RelationInstance::from_json(&doc, Some(&f)).unwrap(), rel);
        let wrong = FunctionTable::parse_tt("n=2 k=2\n1000\n").unwrap();
        assert!(RelationInstance::from_json(&doc, Some(&wrong)).is_err());
    }

    #[test]
    fn transpose_swaps_sides() {
        let rel = RelationInstance::full(&or2()).unwrap();
        let t = rel.transpose();
        assert_eq!(t.xs(), rel.ys());
        assert_eq!(t.transpose(), rel);
    }

    #[test]
    fn hamming_neighbors_of_parity2() {
        let f = FunctionTable::parse_tt("n=2 k=2\n0110\n").unwrap();
        let rel = RelationInstance::hamming_neighbors(&f).unwrap();
        assert_eq!(rel.len(), 4);
        assert!(rel.pairs().iter().all(|p| p.diff.len() == 1));
    }
}
