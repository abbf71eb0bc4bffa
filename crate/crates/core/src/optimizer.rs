//! Searching for good relations and weight schemes.
//!
//! [`exact_alb1_small`] maximizes `Alb1` over every relation inside
//! `f^{-1}(0) × f^{-1}(1)` for tiny functions. [`ascend_scheme`] improves a
//! weight scheme by deterministic multiplicative coordinate ascent. The
//! ascent only ever certifies a lower bound: any valid scheme is a
//! certificate, and no claim is made that the optimum is reached.

use std::collections::HashMap;

use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::adversary::{alb4_value, BoundReport, Method, RelationInstance, WeightScheme, Witness};
use crate::certificates::cert_stats;
use crate::function::{FunctionTable, Value};
use crate::rational::{self, Q};
use crate::{Error, Result};

/// Largest pair grid [`exact_alb1_small`] accepts (`2^24` relations).
pub const ALB1_PAIR_CAP: usize = 24;

/// Largest `|f^{-1}(0)| · |f^{-1}(1)|` [`best_known_bound`] materializes.
pub const FULL_RELATION_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AscentConfig {
    /// Number of passes over all coordinates. Zero returns the start as is.
    pub max_iters: u64,
    pub seed: u64,
    /// Step multiplier applied after a stagnant pass, in `(0, 1)`.
    pub step_shrink: Q,
    /// Relative improvement below which a pass counts as stagnant; the
    /// search stops once the step itself falls to this size.
    pub tolerance: Q,
}

impl Default for AscentConfig {
    fn default() -> Self {
        AscentConfig {
            max_iters: 200,
            seed: 0,
            step_shrink: rational::frac(1, 2),
            tolerance: rational::frac(1, 1_000_000),
        }
    }
}

impl AscentConfig {
    pub fn with_iters(max_iters: u64, seed: u64) -> Self {
        AscentConfig {
            max_iters,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.step_shrink.is_positive() || self.step_shrink >= rational::one() {
            return Err(Error::InvalidParameter(
                "step_shrink must lie in (0, 1)".into(),
            ));
        }
        if !self.tolerance.is_positive() {
            return Err(Error::InvalidParameter("tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// The best `Alb1` relation found by exhaustive search.
#[derive(Debug, Clone)]
pub struct Alb1Optimum {
    pub report: BoundReport,
    pub relation: RelationInstance,
}

/// Certificate ceiling on any squared adversary value for `f`: `N·C₋`, and
/// also `C0·C1` when `f` is total.
fn squared_ceiling(f: &FunctionTable) -> Result<u64> {
    let stats = cert_stats(f)?;
    let mut ceiling = (f.n_vars() * stats.c_minus) as u64;
    if f.is_total() {
        ceiling = ceiling.min((stats.c0 * stats.c1) as u64);
    }
    Ok(ceiling)
}

/// Maximum of `alb1_bound` over all nonempty `R ⊆ f^{-1}(0) × f^{-1}(1)`.
///
/// Relations are enumerated as bitmasks over the pair grid in increasing
/// order; the first mask reaching the maximum is the witness. The search
/// stops early once the certificate ceiling is reached.
pub fn exact_alb1_small(f: &FunctionTable, pair_cap: usize) -> Result<Alb1Optimum> {
    if pair_cap > ALB1_PAIR_CAP {
        return Err(Error::InvalidParameter(format!(
            "pair cap must be at most {ALB1_PAIR_CAP}"
        )));
    }
    if !f.has_both_values() {
        return Err(Error::ConstantFunction);
    }
    let zeros = f.preimage(Value::Zero);
    let ones = f.preimage(Value::One);
    let n_pairs = zeros.len() * ones.len();
    if n_pairs > pair_cap {
        return Err(Error::CapExceeded(format!(
            "{n_pairs} candidate pairs exceed the cap of {pair_cap}"
        )));
    }
    let n = f.n_vars();
    let (nz, no) = (zeros.len(), ones.len());
    let mut row = vec![0u32; nz];
    let mut col = vec![0u32; no];
    let mut row_diff = vec![vec![0u32; n]; nz];
    let mut col_diff = vec![vec![0u32; n]; no];
    for (a, &x) in zeros.iter().enumerate() {
        let xw = f.word(x);
        for (b, &y) in ones.iter().enumerate() {
            let bit = 1u32 << (a * no + b);
            row[a] |= bit;
            col[b] |= bit;
            for i in xw.diff_positions(&f.word(y)) {
                row_diff[a][i] |= bit;
                col_diff[b][i] |= bit;
            }
        }
    }
    let ceiling = squared_ceiling(f)?;

    // (m, m', l, l') of one mask
    let params = |mask: u32| -> (u64, u64, u64, u64) {
        let side = |lines: &[u32], diffs: &[Vec<u32>]| {
            let mut deg = u64::MAX;
            let mut l = 0;
            for (line, diff) in lines.iter().zip(diffs) {
                let d = (line & mask).count_ones() as u64;
                if d == 0 {
                    continue;
                }
                deg = deg.min(d);
                for dm in diff {
                    l = l.max((dm & mask).count_ones() as u64);
                }
            }
            (deg, l)
        };
        let (m, l) = side(&row, &row_diff);
        let (m_prime, l_prime) = side(&col, &col_diff);
        (m, m_prime, l, l_prime)
    };

    let (mut num, mut den) = (0u64, 1u64);
    let mut best_mask = 0u32;
    let last: u64 = 1 << n_pairs;
    for mask in 1..last {
        let mask = mask as u32;
        let (m, m_prime, l, l_prime) = params(mask);
        let (a, b) = (m * m_prime, l * l_prime);
        if a * den > num * b {
            num = a;
            den = b;
            best_mask = mask;
            if num >= ceiling * den {
                break;
            }
        }
    }

    let pairs: Vec<(usize, usize)> = (0..n_pairs)
        .filter(|p| best_mask >> p & 1 == 1)
        .map(|p| (zeros[p / no], ones[p % no]))
        .collect();
    let relation = RelationInstance::from_table(f, &pairs, false)?;
    let (m, m_prime, l, l_prime) = params(best_mask);
    let report = BoundReport::new(
        Method::Alb1,
        rational::frac(num as i64, den as i64),
        Witness::Counts {
            m,
            m_prime,
            l,
            l_prime,
        },
    );
    Ok(Alb1Optimum { report, relation })
}

/// Dense indexing of a relation's `(pair, position)` slots and of the
/// `(x, i)` / `(y, i)` aggregates they feed.
struct Layout {
    /// `(pair, x aggregate, y aggregate)` per slot.
    slots: Vec<(usize, usize, usize)>,
    /// Slot range of every pair.
    pair_slots: Vec<std::ops::Range<usize>>,
    pair_xy: Vec<(usize, usize)>,
    n_x: usize,
    n_y: usize,
    n_xagg: usize,
    n_yagg: usize,
}

impl Layout {
    fn new(rel: &RelationInstance) -> Self {
        let mut xagg: HashMap<(usize, usize), usize> = HashMap::new();
        let mut yagg: HashMap<(usize, usize), usize> = HashMap::new();
        let mut slots = Vec::new();
        let mut pair_slots = Vec::new();
        for (k, p) in rel.pairs().iter().enumerate() {
            let start = slots.len();
            for &i in &p.diff {
                let nx = xagg.len();
                let a = *xagg.entry((p.x, i)).or_insert(nx);
                let ny = yagg.len();
                let b = *yagg.entry((p.y, i)).or_insert(ny);
                slots.push((k, a, b));
            }
            pair_slots.push(start..slots.len());
        }
        Layout {
            slots,
            pair_slots,
            pair_xy: rel.pairs().iter().map(|p| (p.x, p.y)).collect(),
            n_x: rel.xs().len(),
            n_y: rel.ys().len(),
            n_xagg: xagg.len(),
            n_yagg: yagg.len(),
        }
    }
}

/// Arithmetic needed by the objective, so the same code runs on `f64` for
/// screening and on rationals for acceptance.
trait Field: Clone + PartialOrd {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&mut self, other: &Self);
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
}

impl Field for f64 {
    fn zero() -> Self {
        0.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add(&mut self, other: &Self) {
        *self += other;
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
}

impl Field for Q {
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&mut self, other: &Self) {
        *self += other;
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
}

/// `min w_x w_y / (s U_{x,i} V_{y,i})`, or `None` on a zero denominator.
fn objective<F: Field>(lay: &Layout, w: &[F], u: &[F], v: &[F], scale: &F) -> Option<F> {
    let mut wx = vec![F::zero(); lay.n_x];
    let mut wy = vec![F::zero(); lay.n_y];
    let mut ux = vec![F::zero(); lay.n_xagg];
    let mut vy = vec![F::zero(); lay.n_yagg];
    for (k, &(x, y)) in lay.pair_xy.iter().enumerate() {
        wx[x].add(&w[k]);
        wy[y].add(&w[k]);
    }
    for (t, &(_, a, b)) in lay.slots.iter().enumerate() {
        ux[a].add(&u[t]);
        vy[b].add(&v[t]);
    }
    let mut best: Option<F> = None;
    for &(k, a, b) in &lay.slots {
        let den = scale.mul(&ux[a]).mul(&vy[b]);
        if den.is_zero() {
            return None;
        }
        let (x, y) = lay.pair_xy[k];
        let r = wx[x].mul(&wy[y]).div(&den);
        if best.as_ref().is_none_or(|b| r < *b) {
            best = Some(r);
        }
    }
    best
}

#[derive(Clone, Copy)]
enum Coord {
    Weight(usize),
    Split(usize),
}

/// Exact state plus its floating mirror. `u = w r`, `v = w / (s r)` on every
/// slot of a pair with positive weight; zero-weight pairs keep their start.
struct Ascent<'a> {
    lay: &'a Layout,
    scale: Q,
    scale_f: f64,
    w: Vec<Q>,
    u: Vec<Q>,
    v: Vec<Q>,
    wf: Vec<f64>,
    uf: Vec<f64>,
    vf: Vec<f64>,
    value: Q,
    value_f: f64,
}

impl Ascent<'_> {
    fn exact(&self) -> Result<Q> {
        objective(self.lay, &self.w, &self.u, &self.v, &self.scale)
            .ok_or_else(|| Error::InvalidScheme("an aggregate used by the bound is zero".into()))
    }

    fn floating(&self) -> f64 {
        objective(self.lay, &self.wf, &self.uf, &self.vf, &self.scale_f).unwrap_or(0.0)
    }

    fn apply_floating(&mut self, coord: Coord, cf: f64) {
        match coord {
            Coord::Weight(k) => {
                self.wf[k] *= cf;
                for t in self.lay.pair_slots[k].clone() {
                    self.uf[t] *= cf;
                    self.vf[t] *= cf;
                }
            }
            Coord::Split(t) => {
                self.uf[t] *= cf;
                self.vf[t] /= cf;
            }
        }
    }

    fn apply_exact(&mut self, coord: Coord, c: &Q) {
        match coord {
            Coord::Weight(k) => {
                self.w[k] *= c;
                for t in self.lay.pair_slots[k].clone() {
                    self.u[t] *= c;
                    self.v[t] *= c;
                }
            }
            Coord::Split(t) => {
                self.u[t] *= c;
                self.v[t] /= c;
            }
        }
    }

    /// Try one move; keep it only if it improves the exact value.
    fn attempt(&mut self, coord: Coord, c: &Q) -> Result<bool> {
        self.apply_floating(coord, rational::to_f64(c));
        let cand_f = self.floating();
        if cand_f > self.value_f * (1.0 + 1e-12) {
            self.apply_exact(coord, c);
            let cand = self.exact()?;
            if cand > self.value {
                self.value = cand;
                self.value_f = cand_f;
                return Ok(true);
            }
            self.apply_exact(coord, &c.recip());
        }
        self.restore_floating(coord);
        Ok(false)
    }

    fn restore_floating(&mut self, coord: Coord) {
        let slots = match coord {
            Coord::Weight(k) => {
                self.wf[k] = rational::to_f64(&self.w[k]);
                self.lay.pair_slots[k].clone()
            }
            Coord::Split(t) => t..t + 1,
        };
        for t in slots {
            self.uf[t] = rational::to_f64(&self.u[t]);
            self.vf[t] = rational::to_f64(&self.v[t]);
        }
    }
}

/// Coordinate ascent on tight schemes (`s u v = w^2` on every slot).
///
/// Each pass visits the weight of every pair and the split of every slot in
/// a seeded random order, trying the factors `1 + h` and `1 / (1 + h)`.
/// Candidates are screened in floating point and accepted only on a strict
/// exact improvement. After a pass whose relative gain is below
/// `cfg.tolerance`, `h` is multiplied by `cfg.step_shrink`; the search ends
/// when `h` itself drops to the tolerance or after `cfg.max_iters` passes.
pub fn ascend_scheme(
    rel: &RelationInstance,
    init: &WeightScheme,
    cfg: &AscentConfig,
) -> Result<(WeightScheme, BoundReport)> {
    init.require_valid(rel)?;
    cfg.validate()?;
    let start = alb4_value(rel, init)?;
    if cfg.max_iters == 0 {
        return Ok((init.clone(), start));
    }
    let lay = Layout::new(rel);
    let scale = init.uv_scale();
    let flat = |rows: &[Vec<Q>]| -> Vec<Q> { rows.iter().flatten().cloned().collect() };
    let w = init.w().to_vec();
    let u = flat(init.u());
    let mut v = flat(init.v());
    // tighten: v = w^2 / (s u) only lowers the aggregates
    for (t, &(k, _, _)) in lay.slots.iter().enumerate() {
        if w[k].is_positive() {
            v[t] = &w[k] * &w[k] / (&scale * &u[t]);
        }
    }
    let to_f = |xs: &[Q]| -> Vec<f64> { xs.iter().map(rational::to_f64).collect() };
    let mut st = Ascent {
        lay: &lay,
        scale_f: rational::to_f64(&scale),
        wf: to_f(&w),
        uf: to_f(&u),
        vf: to_f(&v),
        scale,
        w,
        u,
        v,
        value: rational::zero(),
        value_f: 0.0,
    };
    st.value = st.exact()?;
    st.value_f = st.floating();

    let mut coords: Vec<Coord> = Vec::new();
    for (k, range) in lay.pair_slots.iter().enumerate() {
        if st.w[k].is_positive() {
            coords.push(Coord::Weight(k));
            coords.extend(range.clone().map(Coord::Split));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut h = rational::one();
    for _ in 0..cfg.max_iters {
        let before = st.value.clone();
        coords.shuffle(&mut rng);
        let up = rational::one() + &h;
        let down = up.recip();
        for &coord in &coords {
            if !st.attempt(coord, &up)? {
                st.attempt(coord, &down)?;
            }
        }
        if &st.value - &before < &cfg.tolerance * &before {
            if h <= cfg.tolerance {
                break;
            }
            h *= &cfg.step_shrink;
        }
    }

    let rows = |flat: &[Q]| -> Vec<Vec<Q>> {
        lay.pair_slots
            .iter()
            .map(|r| flat[r.clone()].to_vec())
            .collect()
    };
    let mut scheme = WeightScheme::new(rel, st.w.clone(), rows(&st.u), rows(&st.v))?;
    if let Some(s) = init.sqrt_factor() {
        scheme = scheme.with_sqrt_factor(s.clone())?;
    }
    let report = alb4_value(rel, &scheme)?;
    debug_assert!(report.value_squared >= start.value_squared);
    Ok((scheme, report))
}

/// The best `Alb4` value found for `f`, with the scheme and relation that
/// certify it.
#[derive(Debug, Clone)]
pub struct BestBound {
    pub report: BoundReport,
    pub relation: RelationInstance,
    pub scheme: WeightScheme,
    /// Which start produced it: `full`, `alb1` or `neighbors`.
    pub start: &'static str,
}

/// Ascend from the uniform scheme on the full relation, from the
/// [`exact_alb1_small`] witness when the pair grid is small enough, and from
/// the relation of oppositely valued neighbors; keep the largest value
/// (earliest start on ties). The result is checked against `N·C₋`.
pub fn best_known_bound(f: &FunctionTable, cfg: &AscentConfig) -> Result<BestBound> {
    if !f.has_both_values() {
        return Err(Error::ConstantFunction);
    }
    cfg.validate()?;
    let n_pairs = f.preimage(Value::Zero).len() * f.preimage(Value::One).len();
    if n_pairs > FULL_RELATION_CAP {
        return Err(Error::CapExceeded(format!(
            "{n_pairs} pairs exceed the full-relation cap of {FULL_RELATION_CAP}"
        )));
    }
    let mut starts: Vec<(&'static str, RelationInstance)> =
        vec![("full", RelationInstance::full(f)?)];
    if n_pairs <= ALB1_PAIR_CAP {
        starts.push(("alb1", exact_alb1_small(f, ALB1_PAIR_CAP)?.relation));
    }
    match RelationInstance::hamming_neighbors(f) {
        Ok(rel) => starts.push(("neighbors", rel)),
        Err(Error::EmptyRelation) => {}
        Err(e) => return Err(e),
    }
    let results: Vec<Result<BestBound>> = starts
        .into_par_iter()
        .map(|(start, relation)| {
            let init = WeightScheme::uniform(&relation);
            let (scheme, report) = ascend_scheme(&relation, &init, cfg)?;
            Ok(BestBound {
                report,
                relation,
                scheme,
                start,
            })
        })
        .collect();
    let mut best: Option<BestBound> = None;
    for r in results {
        let r = r?;
        if best
            .as_ref()
            .is_none_or(|b| r.report.value_squared > b.report.value_squared)
        {
            best = Some(r);
        }
    }
    let best = best.expect("the full relation is always a start");
    let stats = cert_stats(f)?;
    let ceiling = rational::int((f.n_vars() * stats.c_minus) as i64);
    if best.report.value_squared > ceiling {
        return Err(Error::SelfCheck(format!(
            "bound squared {} exceeds N*C_- = {}",
            rational::to_string(&best.report.value_squared),
            rational::to_string(&ceiling)
        )));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn table(n: usize, s: &str) -> FunctionTable {
        FunctionTable::parse_tt(&format!("n={n} k=2\n{s}\n")).unwrap()
    }

    #[test]
    fn alb1_examples() {
        assert_eq!(
            exact_alb1_small(&table(2, "0111"), 24)
                .unwrap()
                .report
                .value_squared,
            int(2)
        );
        assert_eq!(
            exact_alb1_small(&table(2, "0001"), 24)
                .unwrap()
                .report
                .value_squared,
            int(2)
        );
        assert_eq!(
            exact_alb1_small(&table(2, "0110"), 24)
                .unwrap()
                .report
                .value_squared,
            int(4)
        );
    }

    #[test]
    fn alb1_errors() {
        assert!(matches!(
            exact_alb1_small(&table(2, "0000"), 24),
            Err(Error::ConstantFunction)
        ));
        assert!(matches!(
            exact_alb1_small(&table(2, "0110"), 3),
            Err(Error::CapExceeded(_))
        ));
        assert!(matches!(
            exact_alb1_small(&table(2, "0110"), 25),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn zero_iterations_is_identity() {
        let f = table(2, "0110");
        let rel = RelationInstance::full(&f).unwrap();
        let init = WeightScheme::from_fn(&rel, |k| int(k as i64 + 1), |_, _| int(5), |_, _| int(7));
        let (s, r) = ascend_scheme(&rel, &init, &AscentConfig::with_iters(0, 3)).unwrap();
        assert_eq!(s, init);
        assert_eq!(r, alb4_value(&rel, &init).unwrap());
    }

    #[test]
    fn bad_config_rejected() {
        let f = table(2, "0111");
        let cfg = AscentConfig {
            step_shrink: int(1),
            ..AscentConfig::default()
        };
        assert!(matches!(
            best_known_bound(&f, &cfg),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn best_bound_examples() {
        let cfg = AscentConfig::default();
        assert_eq!(
            best_known_bound(&table(2, "0111"), &cfg)
                .unwrap()
                .report
                .value_squared,
            int(2)
        );
        assert_eq!(
            best_known_bound(&table(3, "01101001"), &cfg)
                .unwrap()
                .report
                .value_squared,
            int(9)
        );
    }
}
