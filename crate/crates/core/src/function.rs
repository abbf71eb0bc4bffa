//! Truth-table representation of small total or partial functions
//! `f: [k]^N -> {0, 1}`.
//!
//! Inputs are indexed little-endian in base `k`: position 1 is the least
//! significant digit, so `index(x) = sum x_i * k^(i-1)`.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Hard cap on the number of table entries.
pub const MAX_TABLE_LEN: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Zero,
    One,
    Undefined,
}

impl Value {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Value::One
        } else {
            Value::Zero
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Value::Zero => '0',
            Value::One => '1',
            Value::Undefined => '*',
        }
    }

    fn from_symbol(c: char) -> Result<Self> {
        match c {
            '0' => Ok(Value::Zero),
            '1' => Ok(Value::One),
            '*' => Ok(Value::Undefined),
            other => Err(Error::InvalidSymbol(other)),
        }
    }

    pub fn is_defined(self) -> bool {
        self != Value::Undefined
    }

    /// 0/1 flip; `Undefined` stays put.
    pub fn negate(self) -> Self {
        match self {
            Value::Zero => Value::One,
            Value::One => Value::Zero,
            Value::Undefined => Value::Undefined,
        }
    }
}

/// An input `x = (x_1, ..., x_N)`. Positions are 0-based in memory.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InputWord(pub Vec<u32>);

impl InputWord {
    pub fn new(symbols: Vec<u32>) -> Self {
        InputWord(symbols)
    }

    pub fn decode(index: usize, n_vars: usize, alphabet: usize) -> Self {
        let mut rest = index;
        let symbols = (0..n_vars)
            .map(|_| {
                let s = rest % alphabet;
                rest /= alphabet;
                s as u32
            })
            .collect();
        InputWord(symbols)
    }

    /// Little-endian base-`alphabet` index. `None` on overflow.
    pub fn index(&self, alphabet: usize) -> Option<u128> {
        let mut acc: u128 = 0;
        for &s in self.0.iter().rev() {
            acc = acc.checked_mul(alphabet as u128)?.checked_add(s as u128)?;
        }
        Some(acc)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[u32] {
        &self.0
    }

    /// 0-based positions where `self` and `other` differ.
    pub fn diff_positions(&self, other: &InputWord) -> Vec<usize> {
        self.0
            .iter()
            .zip(&other.0)
            .enumerate()
            .filter_map(|(i, (a, b))| (a != b).then_some(i))
            .collect()
    }

    /// Order by numeric index: the most significant (last) position first.
    pub fn index_cmp(&self, other: &InputWord) -> std::cmp::Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.iter().rev().cmp(other.0.iter().rev()))
    }
}

impl fmt::Display for InputWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, ")")
    }
}

/// A function `[k]^N -> {0, 1}` stored as its full value table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionTable {
    n_vars: usize,
    alphabet: usize,
    values: Vec<Value>,
    total: bool,
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    n: usize,
    k: usize,
    values: String,
}

pub fn table_len(n_vars: usize, alphabet: usize) -> Result<usize> {
    if n_vars == 0 {
        return Err(Error::MalformedTable("n must be positive".into()));
    }
    if alphabet < 2 {
        return Err(Error::MalformedTable("k must be at least 2".into()));
    }
    u32::try_from(n_vars)
        .ok()
        .and_then(|n| alphabet.checked_pow(n))
        .filter(|&len| len <= MAX_TABLE_LEN)
        .ok_or(Error::TableTooLarge { n_vars, alphabet })
}

impl FunctionTable {
    pub fn new(n_vars: usize, alphabet: usize, values: Vec<Value>) -> Result<Self> {
        let expected = table_len(n_vars, alphabet)?;
        if values.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: values.len(),
            });
        }
        let total = values.iter().all(|v| v.is_defined());
        Ok(FunctionTable {
            n_vars,
            alphabet,
            values,
            total,
        })
    }

    /// Tabulate `f` over every input in index order.
    pub fn from_fn(
        n_vars: usize,
        alphabet: usize,
        mut f: impl FnMut(&InputWord) -> Value,
    ) -> Result<Self> {
        let len = table_len(n_vars, alphabet)?;
        let values = (0..len)
            .map(|i| f(&InputWord::decode(i, n_vars, alphabet)))
            .collect();
        Self::new(n_vars, alphabet, values)
    }

    /// Boolean function whose truth table is the bit pattern of `id`
    /// (bit `i` is `f` at input index `i`).
    pub fn from_boolean_id(n_vars: usize, id: u64) -> Result<Self> {
        let len = table_len(n_vars, 2)?;
        if len > 64 {
            return Err(Error::InvalidParameter(format!(
                "function id needs n <= 6, got {n_vars}"
            )));
        }
        let values = (0..len)
            .map(|i| Value::from_bool(id >> i & 1 == 1))
            .collect();
        Self::new(n_vars, 2, values)
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Value] {
        &self.values
    }

    pub fn is_total(&self) -> bool {
        self.total
    }

    pub fn is_boolean(&self) -> bool {
        self.alphabet == 2
    }

    pub fn value_at(&self, index: usize) -> Value {
        self.values[index]
    }

    pub fn word(&self, index: usize) -> InputWord {
        InputWord::decode(index, self.n_vars, self.alphabet)
    }

    pub fn index_of(&self, x: &InputWord) -> Result<usize> {
        self.check_word(x)?;
        // check_word bounds every symbol, so the index fits the table
        Ok(x.index(self.alphabet).expect("bounded word") as usize)
    }

    pub fn check_word(&self, x: &InputWord) -> Result<()> {
        if x.len() != self.n_vars {
            return Err(Error::WordLength {
                expected: self.n_vars,
                got: x.len(),
            });
        }
        for (position, &symbol) in x.0.iter().enumerate() {
            if symbol as usize >= self.alphabet {
                return Err(Error::SymbolOutOfRange {
                    position: position + 1,
                    symbol,
                    alphabet: self.alphabet,
                });
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: &InputWord) -> Result<Value> {
        Ok(self.values[self.index_of(x)?])
    }

    /// Input indices with value `v`, ascending.
    pub fn preimage(&self, v: Value) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&i| self.values[i] == v)
            .collect()
    }

    pub fn defined_indices(&self) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&i| self.values[i].is_defined())
            .collect()
    }

    /// True when no two defined inputs take different values.
    pub fn is_constant(&self) -> bool {
        let mut seen = self.values.iter().filter(|v| v.is_defined());
        match seen.next() {
            None => true,
            Some(first) => seen.all(|v| v == first),
        }
    }

    pub fn has_both_values(&self) -> bool {
        self.values.contains(&Value::Zero) && self.values.contains(&Value::One)
    }

    pub fn negate(&self) -> FunctionTable {
        FunctionTable {
            values: self.values.iter().map(|v| v.negate()).collect(),
            ..self.clone()
        }
    }

    /// The `.tt` text form: `n=<N> k=<k>` then the value string.
    pub fn to_tt(&self) -> String {
        format!(
            "n={} k={}\n{}\n",
            self.n_vars,
            self.alphabet,
            self.value_string()
        )
    }

    pub fn to_json(&self) -> String {
        format!(
            "{{\"n\":{},\"k\":{},\"values\":\"{}\"}}",
            self.n_vars,
            self.alphabet,
            self.value_string()
        )
    }

    pub fn value_string(&self) -> String {
        self.values.iter().map(|v| v.symbol()).collect()
    }

    pub fn parse_tt(source: &str) -> Result<Self> {
        let mut lines = source.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::MalformedTable("missing header".into()))?;
        let (n_vars, alphabet) = parse_header(header)?;
        let body = lines
            .next()
            .ok_or_else(|| Error::MalformedTable("missing value line".into()))?;
        if lines.any(|l| !l.trim().is_empty()) {
            return Err(Error::MalformedTable(
                "trailing content after value line".into(),
            ));
        }
        Self::from_value_string(n_vars, alphabet, body.trim_end_matches('\r'))
    }

    pub fn parse_json(source: &str) -> Result<Self> {
        let doc: TableJson = serde_json::from_str(source)?;
        Self::from_value_string(doc.n, doc.k, &doc.values)
    }

    /// Accept either form, sniffing on the first non-blank character.
    pub fn parse(source: &str) -> Result<Self> {
        if source.trim_start().starts_with('{') {
            Self::parse_json(source)
        } else {
            Self::parse_tt(source)
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    fn from_value_string(n_vars: usize, alphabet: usize, body: &str) -> Result<Self> {
        let expected = table_len(n_vars, alphabet)?;
        let values = body
            .chars()
            .map(Value::from_symbol)
            .collect::<Result<Vec<_>>>()?;
        if values.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: values.len(),
            });
        }
        Self::new(n_vars, alphabet, values)
    }
}

fn parse_header(header: &str) -> Result<(usize, usize)> {
    let bad = || Error::MalformedTable(format!("bad header {header:?}"));
    let mut n = None;
    let mut k = None;
    for field in header.split_whitespace() {
        let (key, val) = field.split_once('=').ok_or_else(bad)?;
        let val: usize = val.parse().map_err(|_| bad())?;
        match key {
            "n" if n.is_none() => n = Some(val),
            "k" if k.is_none() => k = Some(val),
            _ => return Err(bad()),
        }
    }
    Ok((n.ok_or_else(bad)?, k.ok_or_else(bad)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &[u32]) -> InputWord {
        InputWord::new(s.to_vec())
    }

    #[test]
    fn loads_or2_little_endian() {
        let f = FunctionTable::parse_tt("n=2 k=2\n0111\n").unwrap();
        assert_eq!(f.eval(&w(&[0, 0])).unwrap(), Value::Zero);
        assert_eq!(f.eval(&w(&[1, 0])).unwrap(), Value::One);
        assert_eq!(f.eval(&w(&[0, 1])).unwrap(), Value::One);
        assert_eq!(f.eval(&w(&[1, 1])).unwrap(), Value::One);
        assert!(f.is_total());
    }

    #[test]
    fn loads_identity_and_partial() {
        let id = FunctionTable::parse_tt("n=1 k=2\n01\n").unwrap();
        assert_eq!(id.eval(&w(&[1])).unwrap(), Value::One);
        let p = FunctionTable::parse_tt("n=2 k=2\n01*1\n").unwrap();
        assert!(!p.is_total());
        assert_eq!(p.eval(&w(&[0, 1])).unwrap(), Value::Undefined);
        assert_eq!(p.value_at(2), Value::Undefined);
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(matches!(
            FunctionTable::parse_tt("n=2 k=2\n011\n"),
            Err(Error::LengthMismatch {
                expected: 4,
                got: 3
            })
        ));
        assert!(matches!(
            FunctionTable::parse_tt("n=2 k=2\n01x1\n"),
            Err(Error::InvalidSymbol('x'))
        ));
        assert!(matches!(
            FunctionTable::parse_tt("n=2\n0111\n"),
            Err(Error::MalformedTable(_))
        ));
        assert!(matches!(
            FunctionTable::parse_tt("n=2 k=1\n0\n"),
            Err(Error::MalformedTable(_))
        ));
        assert!(matches!(
            FunctionTable::parse_tt("n=25 k=2\n0\n"),
            Err(Error::TableTooLarge { .. })
        ));
    }

    #[test]
    fn eval_checks_alphabet() {
        let f = FunctionTable::parse_tt("n=2 k=2\n0111\n").unwrap();
        assert!(matches!(
            f.eval(&w(&[2, 0])),
            Err(Error::SymbolOutOfRange { position: 1, .. })
        ));
        assert!(matches!(f.eval(&w(&[1])), Err(Error::WordLength { .. })));
    }

    #[test]
    fn parity3_eval() {
        let f =
            FunctionTable::from_fn(3, 2, |x| Value::from_bool(x.0.iter().sum::<u32>() % 2 == 1))
                .unwrap();
        assert_eq!(f.eval(&w(&[1, 1, 0])).unwrap(), Value::Zero);
    }

    #[test]
    fn both_forms_round_trip_bytes() {
        let tt = "n=2 k=3\n01*110*01\n";
        assert_eq!(FunctionTable::parse(tt).unwrap().to_tt(), tt);
        let js = "{\"n\":2,\"k\":3,\"values\":\"01*110*01\"}";
        assert_eq!(FunctionTable::parse(js).unwrap().to_json(), js);
    }

    #[test]
    fn index_order_matches_numeric_order() {
        let a = InputWord::decode(5, 3, 3);
        let b = InputWord::decode(9, 3, 3);
        assert_eq!(a.index_cmp(&b), std::cmp::Ordering::Less);
        assert_eq!(a.index(3), Some(5));
    }
}
