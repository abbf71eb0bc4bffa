//! The four adversary bound expressions and the `Alb2 -> Alb3` conversion.
//!
//! Every bound is reported through its exact square ([`BoundReport::value_squared`]);
//! the floating `value` is for display only.

mod relation;
mod scheme;

use num_traits::{Signed, Zero};
use serde_json::{json, Value as Json};

pub use relation::{Pair, RelationInstance};
pub use scheme::{Aggregates, SchemeCheck, Violation, WeightScheme};

use crate::function::InputWord;
use crate::rational::{self, Q};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Alb1,
    Alb2,
    Alb3,
    Alb4,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Alb1 => "Alb1",
            Method::Alb2 => "Alb2",
            Method::Alb3 => "Alb3",
            Method::Alb4 => "Alb4",
        }
    }
}

/// Parameters that witness a bound value. Positions are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    Counts {
        m: u64,
        m_prime: u64,
        l: u64,
        l_prime: u64,
    },
    LMax {
        m: u64,
        m_prime: u64,
        l_max: u64,
    },
    /// Arg-mins of the two separate minima.
    SeparateMin {
        x: InputWord,
        i: usize,
        y: InputWord,
        j: usize,
    },
    /// Arg-min of the joint minimum over pairs.
    PairMin {
        x: InputWord,
        y: InputWord,
        i: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub method: Method,
    pub value_squared: Q,
    pub value: f64,
    pub witness: Witness,
}

impl BoundReport {
    pub(crate) fn new(method: Method, value_squared: Q, witness: Witness) -> Self {
        let value = rational::to_f64(&value_squared).sqrt();
        BoundReport {
            method,
            value_squared,
            value,
            witness,
        }
    }

    /// JSON object with sorted keys; the exact square is a `"num/den"` string.
    pub fn to_json(&self, alphabet: usize) -> Json {
        let word = |w: &InputWord| match w.index(alphabet).and_then(|i| u64::try_from(i).ok()) {
            Some(i) => json!(i),
            None => json!(w.to_string()),
        };
        let witness = match &self.witness {
            Witness::Counts {
                m,
                m_prime,
                l,
                l_prime,
            } => {
                json!({"m": m, "m_prime": m_prime, "l": l, "l_prime": l_prime})
            }
            Witness::LMax { m, m_prime, l_max } => {
                json!({"m": m, "m_prime": m_prime, "l_max": l_max})
            }
            Witness::SeparateMin { x, i, y, j } => {
                json!({"x": word(x), "i": i + 1, "y": word(y), "j": j + 1})
            }
            Witness::PairMin { x, y, i } => json!({"x": word(x), "y": word(y), "i": i + 1}),
        };
        json!({
            "method": self.method.name(),
            "value": self.value,
            "value_squared": rational::to_string(&self.value_squared),
            "witness": witness,
        })
    }
}

fn require_nonempty(rel: &RelationInstance) -> Result<()> {
    if rel.is_empty() {
        Err(Error::EmptyRelation)
    } else {
        Ok(())
    }
}

fn min_degrees(rel: &RelationInstance) -> (u64, u64) {
    let m = rel.x_degrees().into_iter().min().unwrap_or(0);
    let m_prime = rel.y_degrees().into_iter().min().unwrap_or(0);
    (m, m_prime)
}

/// `sqrt(m m' / (l l'))`.
pub fn alb1_bound(rel: &RelationInstance) -> Result<BoundReport> {
    require_nonempty(rel)?;
    let (m, m_prime) = min_degrees(rel);
    let l = rel.x_position_degrees().into_values().max().unwrap_or(0);
    let l_prime = rel.y_position_degrees().into_values().max().unwrap_or(0);
    let sq = rational::frac((m * m_prime) as i64, (l * l_prime) as i64);
    Ok(BoundReport::new(
        Method::Alb1,
        sq,
        Witness::Counts {
            m,
            m_prime,
            l,
            l_prime,
        },
    ))
}

/// `l_max = max l_{x,i} l_{y,i}` over pairs and their differing positions.
pub fn l_max(rel: &RelationInstance) -> u64 {
    let lx = rel.x_position_degrees();
    let ly = rel.y_position_degrees();
    rel.pairs()
        .iter()
        .flat_map(|p| p.diff.iter().map(|&i| lx[&(p.x, i)] * ly[&(p.y, i)]))
        .max()
        .unwrap_or(0)
}

/// `sqrt(m m' / l_max)`.
pub fn alb2_bound(rel: &RelationInstance) -> Result<BoundReport> {
    require_nonempty(rel)?;
    let (m, m_prime) = min_degrees(rel);
    let l_max = l_max(rel);
    let sq = rational::frac((m * m_prime) as i64, l_max as i64);
    Ok(BoundReport::new(
        Method::Alb2,
        sq,
        Witness::LMax { m, m_prime, l_max },
    ))
}

pub fn validate_scheme(rel: &RelationInstance, s: &WeightScheme) -> Result<SchemeCheck> {
    s.validate(rel)
}

/// `min_{x,i} w_x/u_{x,i} * min_{y,j} w_y/v_{y,j}`, with positions of zero
/// aggregate treated as `+inf`.
pub fn alb3_value(rel: &RelationInstance, s: &WeightScheme) -> Result<BoundReport> {
    s.require_valid(rel)?;
    let agg = s.aggregates(rel)?;
    let side_min = |weights: &[Q], sums: &std::collections::BTreeMap<(usize, usize), Q>| {
        let mut best: Option<(Q, usize, usize)> = None;
        for (&(a, i), sum) in sums {
            if !sum.is_positive() {
                continue;
            }
            let r = &weights[a] / sum;
            if best.as_ref().is_none_or(|(b, _, _)| r < *b) {
                best = Some((r, a, i));
            }
        }
        best.ok_or_else(|| Error::InvalidScheme("every u/v aggregate is zero on one side".into()))
    };
    let (rx, x, i) = side_min(&agg.w_x, &agg.u_x)?;
    let (ry, y, j) = side_min(&agg.w_y, &agg.v_y)?;
    let sq = rx * ry / s.uv_scale();
    let witness = Witness::SeparateMin {
        x: rel.xs()[x].clone(),
        i,
        y: rel.ys()[y].clone(),
        j,
    };
    Ok(BoundReport::new(Method::Alb3, sq, witness))
}

/// `min over (x,y) in R, x_i != y_i of w_x w_y / (u_{x,i} v_{y,i})`.
pub fn alb4_value(rel: &RelationInstance, s: &WeightScheme) -> Result<BoundReport> {
    s.require_valid(rel)?;
    let agg = s.aggregates(rel)?;
    let scale = s.uv_scale();
    let mut best: Option<(Q, usize, usize)> = None;
    for (k, p) in rel.pairs().iter().enumerate() {
        for &i in &p.diff {
            let den = &scale * &agg.u_x[&(p.x, i)] * &agg.v_y[&(p.y, i)];
            if den.is_zero() {
                return Err(Error::ZeroDenominator {
                    x: p.x,
                    y: p.y,
                    position: i + 1,
                });
            }
            let r = &agg.w_x[p.x] * &agg.w_y[p.y] / den;
            if best.as_ref().is_none_or(|(b, _, _)| r < *b) {
                best = Some((r, k, i));
            }
        }
    }
    let (sq, k, i) = best.ok_or(Error::EmptyRelation)?;
    let p = &rel.pairs()[k];
    let witness = Witness::PairMin {
        x: rel.xs()[p.x].clone(),
        y: rel.ys()[p.y].clone(),
        i,
    };
    Ok(BoundReport::new(Method::Alb4, sq, witness))
}

/// The scheme `w = 1`, `u = sqrt(l_max)/l_{x,i}`, `v = sqrt(l_max)/l_{y,i}`.
///
/// Its `Alb3` value equals the `Alb2` bound of the same relation exactly.
/// When `l_max` is not a perfect square it is carried as the scheme's
/// square-root factor.
pub fn alb2_to_scheme(rel: &RelationInstance) -> Result<WeightScheme> {
    require_nonempty(rel)?;
    let lx = rel.x_position_degrees();
    let ly = rel.y_position_degrees();
    let lm = rational::int(l_max(rel) as i64);
    let pairs = rel.pairs();
    let (root, factor) = match rational::sqrt_exact(&lm) {
        Some(r) => (r, None),
        None => (rational::one(), Some(lm)),
    };
    let scheme = WeightScheme::from_fn(
        rel,
        |_| rational::one(),
        |k, i| &root / rational::int(lx[&(pairs[k].x, i)] as i64),
        |k, i| &root / rational::int(ly[&(pairs[k].y, i)] as i64),
    );
    match factor {
        Some(s) => scheme.with_sqrt_factor(s),
        None => Ok(scheme),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::FunctionTable;
    use crate::rational::{frac, int};

    fn table(n: usize, s: &str) -> FunctionTable {
        FunctionTable::parse_tt(&format!("n={n} k=2\n{s}\n")).unwrap()
    }

    fn or2_rel() -> RelationInstance {
        RelationInstance::from_table(&table(2, "0111"), &[(0, 1), (0, 2)], false).unwrap()
    }

    fn parity2_rel() -> RelationInstance {
        RelationInstance::hamming_neighbors(&table(2, "0110")).unwrap()
    }

    #[test]
    fn alb1_examples() {
        let r = alb1_bound(&or2_rel()).unwrap();
        assert_eq!(r.value_squared, int(2));
        assert_eq!(
            r.witness,
            Witness::Counts {
                m: 2,
                m_prime: 1,
                l: 1,
                l_prime: 1
            }
        );
        let r = alb1_bound(&parity2_rel()).unwrap();
        assert_eq!(r.value_squared, int(4));
        assert_eq!(
            r.witness,
            Witness::Counts {
                m: 2,
                m_prime: 2,
                l: 1,
                l_prime: 1
            }
        );
        let single = RelationInstance::from_table(&table(2, "0111"), &[(0, 3)], false).unwrap();
        let r = alb1_bound(&single).unwrap();
        assert_eq!(r.value_squared, int(1));
        assert_eq!(
            r.witness,
            Witness::Counts {
                m: 1,
                m_prime: 1,
                l: 1,
                l_prime: 1
            }
        );
    }

    #[test]
    fn alb2_examples() {
        let r = alb2_bound(&or2_rel()).unwrap();
        assert_eq!(
            r.witness,
            Witness::LMax {
                m: 2,
                m_prime: 1,
                l_max: 1
            }
        );
        assert_eq!(r.value_squared, int(2));
        assert_eq!(alb2_bound(&parity2_rel()).unwrap().value_squared, int(4));
        assert!((r.value - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn scheme_validation() {
        let rel = or2_rel();
        let unit = WeightScheme::uniform(&rel);
        assert!(validate_scheme(&rel, &unit).unwrap().is_valid());
        let mut half = unit.clone();
        half.u[1][0] = frac(1, 2);
        let check = validate_scheme(&rel, &half).unwrap();
        assert!(!check.is_valid());
        assert_eq!(
            check.violations,
            vec![Violation {
                pair: 1,
                position: 1
            }]
        );
        let mut short = unit.clone();
        short.w.pop();
        assert!(matches!(
            validate_scheme(&rel, &short),
            Err(Error::InvalidScheme(_))
        ));
    }

    #[test]
    fn zero_entries_allowed_while_aggregates_positive() {
        let f = table(2, "0111");
        let rel = RelationInstance::full(&f).unwrap();
        let mut s = WeightScheme::uniform(&rel);
        // zero out the pair (0, 3): w_y for y = 3 becomes zero
        s.w[2] = int(0);
        assert_eq!(validate_scheme(&rel, &s).unwrap().empty_y, vec![2]);
        s.w[2] = int(1);
        s.u[2][0] = int(0);
        assert!(!validate_scheme(&rel, &s).unwrap().is_valid());
    }

    #[test]
    fn alb3_and_alb4_unit_schemes() {
        let rel = or2_rel();
        let unit = WeightScheme::uniform(&rel);
        assert_eq!(alb3_value(&rel, &unit).unwrap().value_squared, int(2));
        assert_eq!(alb4_value(&rel, &unit).unwrap().value_squared, int(2));
        let single = RelationInstance::from_table(&table(2, "0111"), &[(0, 1)], false).unwrap();
        let unit = WeightScheme::uniform(&single);
        assert_eq!(alb3_value(&single, &unit).unwrap().value_squared, int(1));
        assert_eq!(alb4_value(&single, &unit).unwrap().value_squared, int(1));
    }

    #[test]
    fn invalid_schemes_are_refused() {
        let rel = or2_rel();
        let mut s = WeightScheme::uniform(&rel);
        s.v[0][0] = frac(1, 3);
        assert!(matches!(alb3_value(&rel, &s), Err(Error::InvalidScheme(_))));
        assert!(matches!(alb4_value(&rel, &s), Err(Error::InvalidScheme(_))));
    }

    #[test]
    fn conversion_examples() {
        for rel in [or2_rel(), parity2_rel()] {
            let s = alb2_to_scheme(&rel).unwrap();
            assert!(s.sqrt_factor().is_none());
            assert!(s
                .u()
                .iter()
                .flatten()
                .chain(s.v().iter().flatten())
                .all(|e| *e == int(1)));
            assert_eq!(
                alb3_value(&rel, &s).unwrap().value_squared,
                alb2_bound(&rel).unwrap().value_squared
            );
        }
    }

    #[test]
    fn irrational_conversion_stays_exact() {
        // both partners of 000 differ from it at position 1: l_max = 2 * 1
        let f = table(3, "01111111");
        let rel = RelationInstance::from_table(&f, &[(0, 1), (0, 3), (0, 4)], false).unwrap();
        let s = alb2_to_scheme(&rel).unwrap();
        assert_eq!(s.sqrt_factor(), Some(&int(2)));
        assert!(validate_scheme(&rel, &s).unwrap().is_valid());
        assert_eq!(
            alb3_value(&rel, &s).unwrap().value_squared,
            alb2_bound(&rel).unwrap().value_squared
        );
        let doc = s.to_json(&rel).unwrap();
        assert_eq!(doc["sqrt_lmax_factor"], Json::Bool(true));
        assert_eq!(WeightScheme::from_json(&doc, &rel).unwrap(), s);
    }

    #[test]
    fn scheme_json_round_trip() {
        let rel = or2_rel();
        let s = WeightScheme::from_fn(
            &rel,
            |k| int(k as i64 + 1),
            |_, _| frac(3, 2),
            |_, _| int(3),
        );
        let doc = s.to_json(&rel).unwrap();
        assert_eq!(doc["w"].to_string(), "[[0,1,1,1],[0,2,2,1]]");
        assert_eq!(doc["u"].to_string(), "[[0,1,1,3,2],[0,2,2,3,2]]");
        assert_eq!(WeightScheme::from_json(&doc, &rel).unwrap(), s);
    }

    #[test]
    fn report_json_is_exact() {
        let r = alb2_bound(&or2_rel()).unwrap();
        let doc = r.to_json(2);
        assert_eq!(doc["value_squared"], "2/1");
        assert_eq!(doc["witness"]["l_max"], 1);
    }
}
