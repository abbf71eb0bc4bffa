use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value as Json};

use super::RelationInstance;
use crate::function::InputWord;
use crate::rational::{self, Q};
use crate::{Error, Result};

/// Weights `w(x,y)`, `u(x,y,i)`, `v(x,y,i)` over a relation.
///
/// Entries are aligned with [`RelationInstance::pairs`]: `w[k]` belongs to
/// pair `k` and `u[k][t]`, `v[k][t]` to its `t`-th differing position.
///
/// When `sqrt_factor` is `Some(s)` the stored `u` and `v` are scaled by
/// `sqrt(s)`: the actual weights are `sqrt(s) * u` and `sqrt(s) * v`. Every
/// bound pairs one `u` aggregate with one `v` aggregate, so only `s` itself
/// enters the arithmetic and everything stays rational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightScheme {
    pub(crate) w: Vec<Q>,
    pub(crate) u: Vec<Vec<Q>>,
    pub(crate) v: Vec<Vec<Q>>,
    pub(crate) sqrt_factor: Option<Q>,
}

/// Per-input sums of a scheme. `u_x` and `v_y` exclude the square-root
/// factor.
#[derive(Debug, Clone)]
pub struct Aggregates {
    pub w_x: Vec<Q>,
    pub w_y: Vec<Q>,
    pub u_x: BTreeMap<(usize, usize), Q>,
    pub v_y: BTreeMap<(usize, usize), Q>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub pair: usize,
    /// 0-based position.
    pub position: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SchemeCheck {
    /// Triples where `u * v < w^2`.
    pub violations: Vec<Violation>,
    /// Pairs carrying a negative entry.
    pub negative: Vec<usize>,
    /// Inputs (`X` index) whose `w_x` is not positive.
    pub empty_x: Vec<usize>,
    pub empty_y: Vec<usize>,
}

impl SchemeCheck {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
            && self.negative.is_empty()
            && self.empty_x.is_empty()
            && self.empty_y.is_empty()
    }

    pub fn describe(&self) -> String {
        format!(
            "{} weight inequality violations, {} negative pairs, {} empty x, {} empty y",
            self.violations.len(),
            self.negative.len(),
            self.empty_x.len(),
            self.empty_y.len()
        )
    }
}

impl WeightScheme {
    pub fn new(rel: &RelationInstance, w: Vec<Q>, u: Vec<Vec<Q>>, v: Vec<Vec<Q>>) -> Result<Self> {
        let s = WeightScheme {
            w,
            u,
            v,
            sqrt_factor: None,
        };
        s.check_domain(rel)?;
        Ok(s)
    }

    /// `w`, `u`, `v` all equal to 1.
    pub fn uniform(rel: &RelationInstance) -> Self {
        Self::from_fn(
            rel,
            |_| rational::one(),
            |_, _| rational::one(),
            |_, _| rational::one(),
        )
    }

    /// Build from closures over pair index and (pair index, 0-based position).
    pub fn from_fn(
        rel: &RelationInstance,
        mut w: impl FnMut(usize) -> Q,
        mut u: impl FnMut(usize, usize) -> Q,
        mut v: impl FnMut(usize, usize) -> Q,
    ) -> Self {
        let pairs = rel.pairs();
        WeightScheme {
            w: (0..pairs.len()).map(&mut w).collect(),
            u: pairs
                .iter()
                .enumerate()
                .map(|(k, p)| p.diff.iter().map(|&i| u(k, i)).collect())
                .collect(),
            v: pairs
                .iter()
                .enumerate()
                .map(|(k, p)| p.diff.iter().map(|&i| v(k, i)).collect())
                .collect(),
            sqrt_factor: None,
        }
    }

    pub fn with_sqrt_factor(mut self, s: Q) -> Result<Self> {
        if !s.is_positive() {
            return Err(Error::InvalidScheme(
                "square-root factor must be positive".into(),
            ));
        }
        self.sqrt_factor = if s.is_one() { None } else { Some(s) };
        Ok(self)
    }

    pub fn w(&self) -> &[Q] {
        &self.w
    }

    pub fn u(&self) -> &[Vec<Q>] {
        &self.u
    }

    pub fn v(&self) -> &[Vec<Q>] {
        &self.v
    }

    pub fn sqrt_factor(&self) -> Option<&Q> {
        self.sqrt_factor.as_ref()
    }

    /// The factor multiplying every `u * v` product (1 when absent).
    pub fn uv_scale(&self) -> Q {
        self.sqrt_factor.clone().unwrap_or_else(rational::one)
    }

    pub(crate) fn check_domain(&self, rel: &RelationInstance) -> Result<()> {
        let pairs = rel.pairs();
        let ok = self.w.len() == pairs.len()
            && self.u.len() == pairs.len()
            && self.v.len() == pairs.len()
            && pairs
                .iter()
                .zip(self.u.iter().zip(&self.v))
                .all(|(p, (u, v))| u.len() == p.diff.len() && v.len() == p.diff.len());
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidScheme(
                "scheme domain does not match the relation".into(),
            ))
        }
    }

    pub fn aggregates(&self, rel: &RelationInstance) -> Result<Aggregates> {
        self.check_domain(rel)?;
        let mut w_x = vec![rational::zero(); rel.xs().len()];
        let mut w_y = vec![rational::zero(); rel.ys().len()];
        let mut u_x: BTreeMap<(usize, usize), Q> = BTreeMap::new();
        let mut v_y: BTreeMap<(usize, usize), Q> = BTreeMap::new();
        for (k, p) in rel.pairs().iter().enumerate() {
            w_x[p.x] += &self.w[k];
            w_y[p.y] += &self.w[k];
            for (t, &i) in p.diff.iter().enumerate() {
                *u_x.entry((p.x, i)).or_insert_with(rational::zero) += &self.u[k][t];
                *v_y.entry((p.y, i)).or_insert_with(rational::zero) += &self.v[k][t];
            }
        }
        Ok(Aggregates { w_x, w_y, u_x, v_y })
    }

    /// Check `u * v >= w^2` on every triple plus positivity of `w_x`, `w_y`.
    /// Zero entries are admitted as long as the aggregates stay positive.
    pub fn validate(&self, rel: &RelationInstance) -> Result<SchemeCheck> {
        let agg = self.aggregates(rel)?;
        let scale = self.uv_scale();
        let mut check = SchemeCheck::default();
        for (k, p) in rel.pairs().iter().enumerate() {
            let w2 = &self.w[k] * &self.w[k];
            if self.w[k].is_negative()
                || self.u[k].iter().any(Signed::is_negative)
                || self.v[k].iter().any(Signed::is_negative)
            {
                check.negative.push(k);
            }
            for (t, &i) in p.diff.iter().enumerate() {
                if &scale * &self.u[k][t] * &self.v[k][t] < w2 {
                    check.violations.push(Violation {
                        pair: k,
                        position: i,
                    });
                }
            }
        }
        check.empty_x = (0..agg.w_x.len())
            .filter(|&x| !agg.w_x[x].is_positive())
            .collect();
        check.empty_y = (0..agg.w_y.len())
            .filter(|&y| !agg.w_y[y].is_positive())
            .collect();
        Ok(check)
    }

    pub fn require_valid(&self, rel: &RelationInstance) -> Result<()> {
        let check = self.validate(rel)?;
        if check.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidScheme(check.describe()))
        }
    }

    /// Drop the pairs touching an input whose aggregate `w` is zero. Those
    /// pairs carry `w = 0`; removing them can only shrink the aggregates of
    /// the surviving inputs. Errors if nothing survives.
    pub fn prune_empty(&self, rel: &RelationInstance) -> Result<(RelationInstance, WeightScheme)> {
        self.check_domain(rel)?;
        let agg = self.aggregates(rel)?;
        let keep: Vec<usize> = (0..rel.len())
            .filter(|&k| {
                let p = &rel.pairs()[k];
                agg.w_x[p.x].is_positive() && agg.w_y[p.y].is_positive()
            })
            .collect();
        if keep.is_empty() {
            return Err(Error::EmptyRelation);
        }
        let sub = rel.subrelation(&keep)?;
        let old: HashMap<(&InputWord, &InputWord), usize> = keep
            .iter()
            .map(|&k| {
                let p = &rel.pairs()[k];
                ((&rel.xs()[p.x], &rel.ys()[p.y]), k)
            })
            .collect();
        let source: Vec<usize> = sub
            .pairs()
            .iter()
            .map(|p| old[&(&sub.xs()[p.x], &sub.ys()[p.y])])
            .collect();
        let pruned = WeightScheme {
            w: source.iter().map(|&k| self.w[k].clone()).collect(),
            u: source.iter().map(|&k| self.u[k].clone()).collect(),
            v: source.iter().map(|&k| self.v[k].clone()).collect(),
            sqrt_factor: self.sqrt_factor.clone(),
        };
        Ok((sub, pruned))
    }

    /// Multiply every entry by `c`.
    pub fn scaled(&self, c: &Q) -> Self {
        let scale = |rows: &[Vec<Q>]| {
            rows.iter()
                .map(|r| r.iter().map(|e| e * c).collect())
                .collect()
        };
        WeightScheme {
            w: self.w.iter().map(|e| e * c).collect(),
            u: scale(&self.u),
            v: scale(&self.v),
            sqrt_factor: self.sqrt_factor.clone(),
        }
    }

    /// Sparse-triple document keyed by table indices and 1-based positions.
    /// Schemes with a square-root factor store the squared weights and carry
    /// `"sqrt_lmax_factor": true` with the factor under `"lmax"`.
    pub fn to_json(&self, rel: &RelationInstance) -> Result<Json> {
        self.check_domain(rel)?;
        let squared = self.sqrt_factor.is_some();
        let scale = self.uv_scale();
        let mut w = Vec::new();
        let mut u = Vec::new();
        let mut v = Vec::new();
        for (k, p) in rel.pairs().iter().enumerate() {
            let (xi, yi) = (rel.x_index(p.x)?, rel.y_index(p.y)?);
            let [n, d] = number_parts(&self.w[k]);
            w.push(json!([xi, yi, n, d]));
            for (t, &i) in p.diff.iter().enumerate() {
                let (ue, ve) = if squared {
                    (
                        &scale * &self.u[k][t] * &self.u[k][t],
                        &scale * &self.v[k][t] * &self.v[k][t],
                    )
                } else {
                    (self.u[k][t].clone(), self.v[k][t].clone())
                };
                let [n, d] = number_parts(&ue);
                u.push(json!([xi, yi, i + 1, n, d]));
                let [n, d] = number_parts(&ve);
                v.push(json!([xi, yi, i + 1, n, d]));
            }
        }
        let mut doc = json!({"w": w, "u": u, "v": v});
        if let Some(s) = &self.sqrt_factor {
            doc["sqrt_lmax_factor"] = Json::Bool(true);
            doc["lmax"] = Json::String(rational::to_string(s));
        }
        Ok(doc)
    }

    pub fn from_json(doc: &Json, rel: &RelationInstance) -> Result<Self> {
        let bad = |m: &str| Error::InvalidScheme(m.to_string());
        let squared = doc
            .get("sqrt_lmax_factor")
            .and_then(Json::as_bool)
            .unwrap_or(false);
        let factor = if squared {
            let s = doc
                .get("lmax")
                .and_then(Json::as_str)
                .ok_or_else(|| bad("missing lmax"))?;
            Some(rational::parse(s)?)
        } else {
            None
        };
        let lookup = rel.pair_index();
        let x_of: HashMap<u64, usize> = (0..rel.xs().len())
            .map(|x| Ok((rel.x_index(x)?, x)))
            .collect::<Result<_>>()?;
        let y_of: HashMap<u64, usize> = (0..rel.ys().len())
            .map(|y| Ok((rel.y_index(y)?, y)))
            .collect::<Result<_>>()?;
        let locate = |xi: u64, yi: u64| -> Result<usize> {
            let x = x_of
                .get(&xi)
                .ok_or_else(|| bad("entry for an input outside the relation"))?;
            let y = y_of
                .get(&yi)
                .ok_or_else(|| bad("entry for an input outside the relation"))?;
            lookup
                .get(&(*x, *y))
                .copied()
                .ok_or_else(|| bad("entry for a pair outside the relation"))
        };
        let entries = |name: &str| -> Result<&Vec<Json>> {
            doc.get(name)
                .and_then(Json::as_array)
                .ok_or_else(|| bad("missing w/u/v arrays"))
        };
        let n_pairs = rel.len();
        let mut w: Vec<Option<Q>> = vec![None; n_pairs];
        for e in entries("w")? {
            let a = e
                .as_array()
                .filter(|a| a.len() == 4)
                .ok_or_else(|| bad("w entries are [x,y,num,den]"))?;
            let k = locate(index_of(&a[0])?, index_of(&a[1])?)?;
            if w[k].replace(parse_number(&a[2], &a[3])?).is_some() {
                return Err(bad("duplicate w entry"));
            }
        }
        let read_side = |name: &str| -> Result<Vec<Vec<Q>>> {
            let mut side: Vec<Vec<Option<Q>>> = rel
                .pairs()
                .iter()
                .map(|p| vec![None; p.diff.len()])
                .collect();
            for e in entries(name)? {
                let a = e
                    .as_array()
                    .filter(|a| a.len() == 5)
                    .ok_or_else(|| bad("u/v entries are [x,y,i,num,den]"))?;
                let k = locate(index_of(&a[0])?, index_of(&a[1])?)?;
                let pos = index_of(&a[2])? as usize;
                let t = pos
                    .checked_sub(1)
                    .and_then(|i| rel.pairs()[k].diff.iter().position(|&d| d == i))
                    .ok_or_else(|| bad("u/v entry at a position where the pair agrees"))?;
                let mut val = parse_number(&a[3], &a[4])?;
                if let Some(s) = &factor {
                    val = rational::sqrt_exact(&(val / s))
                        .ok_or_else(|| bad("squared entry is not a rational square"))?;
                }
                if side[k][t].replace(val).is_some() {
                    return Err(bad("duplicate u/v entry"));
                }
            }
            side.into_iter()
                .map(|row| row.into_iter().collect::<Option<Vec<_>>>())
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| bad("scheme does not cover every triple"))
        };
        let u = read_side("u")?;
        let v = read_side("v")?;
        let w = w
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| bad("scheme does not cover every pair"))?;
        let scheme = WeightScheme::new(rel, w, u, v)?;
        match factor {
            Some(s) => scheme.with_sqrt_factor(s),
            None => Ok(scheme),
        }
    }
}

fn index_of(v: &Json) -> Result<u64> {
    v.as_u64()
        .ok_or_else(|| Error::InvalidScheme("indices must be nonnegative integers".into()))
}

/// Numerator and denominator as JSON integers, or digit strings when they
/// exceed 64 bits.
fn number_parts(q: &Q) -> [Json; 2] {
    let part = |b: &BigInt| match b.to_i64() {
        Some(i) => Json::from(i),
        None => Json::String(b.to_string()),
    };
    [part(q.numer()), part(q.denom())]
}

fn parse_number(num: &Json, den: &Json) -> Result<Q> {
    let part = |v: &Json| -> Result<BigInt> {
        match v {
            Json::Number(n) => n
                .as_i64()
                .map(BigInt::from)
                .ok_or_else(|| Error::InvalidScheme("weights must be integers".into())),
            Json::String(s) => s
                .parse()
                .map_err(|_| Error::InvalidScheme(format!("bad integer {s:?}"))),
            _ => Err(Error::InvalidScheme("weights must be integers".into())),
        }
    };
    let d = part(den)?;
    if d.is_zero() {
        return Err(Error::InvalidScheme("zero denominator in a weight".into()));
    }
    Ok(Q::new(part(num)?, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::FunctionTable;

    #[test]
    fn prune_drops_zero_weight_inputs() {
        let f = FunctionTable::parse_tt("n=2 k=2\n0111\n").unwrap();
        let rel = RelationInstance::full(&f).unwrap();
        // pairs (00,10), (00,01), (00,11): silence the last one
        let s = WeightScheme::from_fn(
            &rel,
            |k| {
                if k == 2 {
                    rational::zero()
                } else {
                    rational::one()
                }
            },
            |_, _| rational::one(),
            |_, _| rational::one(),
        );
        assert!(!s.validate(&rel).unwrap().is_valid());
        let (sub, pruned) = s.prune_empty(&rel).unwrap();
        assert_eq!(sub.len(), 2);
        assert!(pruned.validate(&sub).unwrap().is_valid());
        assert!(pruned.w().iter().all(|w| w.is_one()));
    }

    #[test]
    fn prune_of_all_zero_scheme_errors() {
        let f = FunctionTable::parse_tt("n=1 k=2\n01\n").unwrap();
        let rel = RelationInstance::full(&f).unwrap();
        let s = WeightScheme::uniform(&rel).scaled(&rational::zero());
        assert!(matches!(s.prune_empty(&rel), Err(Error::EmptyRelation)));
    }
}
