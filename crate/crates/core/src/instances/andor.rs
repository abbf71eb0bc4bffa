use std::collections::BTreeMap;

use crate::certificates::{CertificateAssignment, PositionSet};
use crate::function::{table_len, FunctionTable, InputWord, Value};
use crate::{Error, Result};

/// Largest height whose truth table is materialized.
pub const ANDOR_TABLE_MAX_HEIGHT: usize = 4;

/// Largest height supported at all (words are bit vectors of `2^height`).
pub const ANDOR_MAX_HEIGHT: usize = 16;

/// Complete binary AND-OR tree. The root is level 1 and an AND gate; gates
/// alternate by level and the `2^height` leaves are the inputs, left to
/// right.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AndOrTree {
    height: usize,
}

impl AndOrTree {
    pub fn new(height: usize) -> Result<Self> {
        if height == 0 || height % 2 == 1 || height > ANDOR_MAX_HEIGHT {
            return Err(Error::InvalidParameter(format!(
                "tree height must be even and in 2..={ANDOR_MAX_HEIGHT}, got {height}"
            )));
        }
        Ok(AndOrTree { height })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn n_leaves(&self) -> usize {
        1 << self.height
    }

    fn require_len(&self, len: usize) -> Result<()> {
        if len != self.n_leaves() {
            return Err(Error::WordLength {
                expected: self.n_leaves(),
                got: len,
            });
        }
        Ok(())
    }

    pub fn eval(&self, x: &[bool]) -> Result<bool> {
        self.require_len(x.len())?;
        Ok(self.certify(x, 1, 0).0)
    }

    /// Value of `x` and its certificate from the inductive construction: a
    /// gate whose value is forced by one child takes that child's
    /// certificate (the left one when both force it); otherwise it takes
    /// the union of both children's certificates.
    pub fn certificate(&self, x: &[bool]) -> Result<(bool, PositionSet)> {
        self.require_len(x.len())?;
        let (v, set) = self.certify(x, 1, 0);
        Ok((v, PositionSet::new(set)))
    }

    fn certify(&self, x: &[bool], level: usize, lo: usize) -> (bool, Vec<usize>) {
        if level == self.height + 1 {
            return (x[lo], vec![lo]);
        }
        let half = 1 << (self.height - level);
        let (vl, cl) = self.certify(x, level + 1, lo);
        let (vr, cr) = self.certify(x, level + 1, lo + half);
        // the value that a single child can force
        let forcing = level.is_multiple_of(2);
        if vl == forcing {
            (forcing, cl)
        } else if vr == forcing {
            (forcing, cr)
        } else {
            let mut both = cl;
            both.extend(cr);
            (!forcing, both)
        }
    }

    /// Kleene evaluation: `Some(v)` iff every completion of the partial
    /// input evaluates to `v`. Exact here because every leaf is read once.
    pub fn forced_value(&self, partial: &[Option<bool>]) -> Result<Option<bool>> {
        self.require_len(partial.len())?;
        Ok(self.kleene(partial, 1, 0))
    }

    fn kleene(&self, x: &[Option<bool>], level: usize, lo: usize) -> Option<bool> {
        if level == self.height + 1 {
            return x[lo];
        }
        let half = 1 << (self.height - level);
        let l = self.kleene(x, level + 1, lo);
        let r = self.kleene(x, level + 1, lo + half);
        let forcing = level.is_multiple_of(2);
        if l == Some(forcing) || r == Some(forcing) {
            Some(forcing)
        } else if l == Some(!forcing) && r == Some(!forcing) {
            Some(!forcing)
        } else {
            None
        }
    }

    /// Whether `set` is a certificate for `x`.
    pub fn is_certificate(&self, x: &[bool], set: &PositionSet) -> Result<bool> {
        self.require_len(x.len())?;
        let mut partial = vec![None; x.len()];
        for &p in set.positions() {
            if p >= x.len() {
                return Err(Error::InvalidParameter(format!(
                    "position {} out of range",
                    p + 1
                )));
            }
            partial[p] = Some(x[p]);
        }
        Ok(self.forced_value(&partial)? == Some(self.eval(x)?))
    }

    fn leaves(&self, index: usize) -> Vec<bool> {
        (0..self.n_leaves()).map(|i| index >> i & 1 == 1).collect()
    }

    fn require_table_height(&self) -> Result<()> {
        if self.height > ANDOR_TABLE_MAX_HEIGHT {
            return Err(Error::TableTooLarge {
                n_vars: self.n_leaves(),
                alphabet: 2,
            });
        }
        table_len(self.n_leaves(), 2).map(|_| ())
    }

    pub fn table(&self) -> Result<FunctionTable> {
        self.require_table_height()?;
        FunctionTable::from_fn(self.n_leaves(), 2, |w| {
            let x: Vec<bool> = w.symbols().iter().map(|&s| s == 1).collect();
            Value::from_bool(self.certify(&x, 1, 0).0)
        })
    }

    /// The inductive certificate of every input, for tabulated heights.
    pub fn assignment(&self) -> Result<CertificateAssignment> {
        self.require_table_height()?;
        let sets: BTreeMap<usize, PositionSet> = (0..1usize << self.n_leaves())
            .map(|i| (i, PositionSet::new(self.certify(&self.leaves(i), 1, 0).1)))
            .collect();
        Ok(CertificateAssignment { sets })
    }
}

/// Convert a 0/1 word to leaf values.
pub fn word_leaves(x: &InputWord) -> Vec<bool> {
    x.symbols().iter().map(|&s| s == 1).collect()
}
