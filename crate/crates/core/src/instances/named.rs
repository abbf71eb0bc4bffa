use std::fmt;
use std::str::FromStr;

use crate::function::{table_len, FunctionTable, InputWord, Value};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedFunction {
    Or,
    And,
    Parity,
    Majority,
    ElementDistinctness,
    InvertPermutation,
}

impl NamedFunction {
    pub fn name(self) -> &'static str {
        match self {
            NamedFunction::Or => "or",
            NamedFunction::And => "and",
            NamedFunction::Parity => "parity",
            NamedFunction::Majority => "majority",
            NamedFunction::ElementDistinctness => "element_distinctness",
            NamedFunction::InvertPermutation => "invert_permutation",
        }
    }
}

impl fmt::Display for NamedFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NamedFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.replace('-', "_").as_str() {
            "or" => NamedFunction::Or,
            "and" => NamedFunction::And,
            "parity" => NamedFunction::Parity,
            "majority" => NamedFunction::Majority,
            "element_distinctness" => NamedFunction::ElementDistinctness,
            "invert_permutation" => NamedFunction::InvertPermutation,
            _ => return Err(Error::InvalidParameter(format!("unknown function {s:?}"))),
        })
    }
}

/// 1-based position of symbol 0 in a permutation word, `None` otherwise.
pub fn permutation_marker(x: &InputWord) -> Option<usize> {
    let n = x.len();
    let mut seen = vec![false; n];
    for &s in x.symbols() {
        let s = s as usize;
        if s >= n || seen[s] {
            return None;
        }
        seen[s] = true;
    }
    x.symbols().iter().position(|&s| s == 0).map(|p| p + 1)
}

/// All permutation words of length `n`, in lexicographic order.
pub(crate) fn permutations(n: usize) -> Vec<Vec<u32>> {
    fn extend(n: usize, cur: &mut Vec<u32>, used: &mut [bool], out: &mut Vec<Vec<u32>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for s in 0..n {
            if !used[s] {
                used[s] = true;
                cur.push(s as u32);
                extend(n, cur, used, out);
                cur.pop();
                used[s] = false;
            }
        }
    }
    let mut out = Vec::new();
    extend(n, &mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Tables of the standard named functions.
///
/// `invert_permutation` is defined only on permutation words (`k = n`,
/// symbols `0..n`); it is 1 iff symbol 0 (the first element) sits at an
/// even 1-based position.
pub fn gen_named(name: NamedFunction, n: usize, k: usize) -> Result<FunctionTable> {
    let bad = |m: &str| Err(Error::InvalidParameter(format!("{name}: {m}")));
    if n == 0 {
        return bad("needs at least one variable");
    }
    match name {
        NamedFunction::Or
        | NamedFunction::And
        | NamedFunction::Parity
        | NamedFunction::Majority
            if k != 2 =>
        {
            return bad("needs k = 2");
        }
        NamedFunction::Majority if n.is_multiple_of(2) => return bad("needs odd n"),
        NamedFunction::ElementDistinctness if k < 2 || n < 2 => {
            return bad("needs k >= 2 and n >= 2")
        }
        NamedFunction::InvertPermutation if k != n || n < 2 => return bad("needs k = n >= 2"),
        _ => {}
    }
    if name == NamedFunction::InvertPermutation {
        // only n! of the n^n words are defined
        let mut values = vec![Value::Undefined; table_len(n, k)?];
        for p in permutations(n) {
            let marker = p
                .iter()
                .position(|&s| s == 0)
                .expect("a permutation holds 0")
                + 1;
            let index = InputWord::new(p).index(k).expect("fits the table") as usize;
            values[index] = Value::from_bool(marker % 2 == 0);
        }
        return FunctionTable::new(n, k, values);
    }
    FunctionTable::from_fn(n, k, |x| {
        let s = x.symbols();
        let ones = s.iter().filter(|&&b| b == 1).count();
        match name {
            NamedFunction::Or => Value::from_bool(ones > 0),
            NamedFunction::And => Value::from_bool(ones == n),
            NamedFunction::Parity => Value::from_bool(ones % 2 == 1),
            NamedFunction::Majority => Value::from_bool(2 * ones > n),
            NamedFunction::ElementDistinctness => {
                let mut seen = vec![false; k];
                Value::from_bool(
                    s.iter()
                        .any(|&v| std::mem::replace(&mut seen[v as usize], true)),
                )
            }
            NamedFunction::InvertPermutation => unreachable!("tabulated above"),
        }
    })
}
