//! Generators for the concrete functions and relations: named functions,
//! the AND-OR tree, the graph-property constructions and Invert-a-Permutation.
//!
//! Graph constructions come in two modes. `Explicit` materializes inputs
//! (or, for bipartite matching, the full neighborhoods of representatives)
//! and counts by brute force; `Counting` works from closed-form counts and
//! structured enumeration on canonical representatives. Both report the
//! parameters `m`, `m'`, `l_max` through a [`CountedInstance`].

mod andor;
mod bipartiteness;
pub mod graphs;
mod matching;
mod named;
mod permutation;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value as Json};

use crate::adversary::{BoundReport, Method, RelationInstance, Witness};
use crate::rational;
use crate::{Error, Result};

pub use andor::{word_leaves, AndOrTree, ANDOR_MAX_HEIGHT, ANDOR_TABLE_MAX_HEIGHT};
pub use bipartiteness::{gen_bipartiteness, gen_graph_matching, BIPARTITENESS_EXPLICIT_MAX_N};
pub use graphs::{GraphEncoding, GraphKind};
pub use matching::{
    gen_bipartite_matching, gen_bipartite_matching_with, matching_k_range, MatchingOptions,
    YLayout, MATCHING_EXPLICIT_MAX_N,
};
pub use named::{gen_named, permutation_marker, NamedFunction};
pub use permutation::gen_invert_permutation_relation;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Explicit,
    Counting,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Explicit => "explicit",
            Mode::Counting => "counting",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "explicit" => Ok(Mode::Explicit),
            "counting" => Ok(Mode::Counting),
            _ => Err(Error::InvalidParameter(format!("unknown mode {s:?}"))),
        }
    }
}

/// Outcome of one property check run during generation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: String,
    /// Number of objects the property was checked on.
    pub checked: u64,
    pub passed: bool,
}

/// Collects check outcomes; a failing check aborts generation.
#[derive(Debug, Default)]
pub(crate) struct Checks(Vec<CheckOutcome>);

impl Checks {
    pub(crate) fn record(&mut self, name: &str, checked: u64, passed: bool) -> Result<()> {
        self.0.push(CheckOutcome {
            name: name.to_string(),
            checked,
            passed,
        });
        if passed {
            Ok(())
        } else {
            Err(Error::ConstructionCheck(format!("{name} failed")))
        }
    }
}

/// Counted parameters of a relation construction.
#[derive(Debug, Clone)]
pub struct CountedInstance {
    pub name: String,
    pub n: usize,
    pub mode: Mode,
    pub m: u64,
    pub m_prime: u64,
    pub l_max: u64,
    /// The full relation, when it was materialized.
    pub relation: Option<RelationInstance>,
    /// Human-readable descriptors of the representatives counted on.
    pub representatives: Vec<String>,
    pub checks: Vec<CheckOutcome>,
    /// Construction-specific figures (set sizes, scheme values).
    pub extra: BTreeMap<String, Json>,
}

impl CountedInstance {
    pub(crate) fn new(
        name: &str,
        n: usize,
        mode: Mode,
        (m, m_prime, l_max): (u64, u64, u64),
    ) -> Self {
        CountedInstance {
            name: name.to_string(),
            n,
            mode,
            m,
            m_prime,
            l_max,
            relation: None,
            representatives: Vec::new(),
            checks: Vec::new(),
            extra: BTreeMap::new(),
        }
    }

    /// `Alb2` from the counted parameters: `sqrt(m m' / l_max)`.
    pub fn bound(&self) -> BoundReport {
        BoundReport::new(
            Method::Alb2,
            rational::int(self.m as i64) * rational::int(self.m_prime as i64)
                / rational::int(self.l_max as i64),
            Witness::LMax {
                m: self.m,
                m_prime: self.m_prime,
                l_max: self.l_max,
            },
        )
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Report with sorted keys. The relation itself is not embedded.
    pub fn to_json(&self) -> Json {
        let checks: Vec<Json> = self
            .checks
            .iter()
            .map(|c| json!({"checked": c.checked, "name": c.name, "passed": c.passed}))
            .collect();
        let alphabet = self.relation.as_ref().map_or(2, RelationInstance::alphabet);
        json!({
            "bound": self.bound().to_json(alphabet),
            "checks": checks,
            "extra": self.extra,
            "l_max": self.l_max,
            "m": self.m,
            "m_prime": self.m_prime,
            "mode": self.mode.name(),
            "n": self.n,
            "name": self.name,
            "representatives": self.representatives,
        })
    }
}

/// Shared range `[n/3, 2n/3]` used by the graph constructions.
pub(crate) fn in_third_range(n: usize, value: usize) -> bool {
    3 * value >= n && 3 * value <= 2 * n
}
