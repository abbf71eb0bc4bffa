//! Brute-force reference computations used to cross-check the library.
//! They work directly on truth-table indices and share no code with it.

#![allow(dead_code)]

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use qadv_core::FunctionTable;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Ratio = BigRational;

pub fn ratio(n: u64, d: u64) -> Ratio {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Bit `i` of the Boolean truth-table index.
fn bit(index: usize, i: usize) -> usize {
    index >> i & 1
}

/// Smallest certificate size of input `x` of a total Boolean function given
/// as a 0/1 vector, by scanning subsets in order of size.
pub fn cert_size(values: &[u8], n: usize, x: usize) -> usize {
    let mut masks: Vec<usize> = (0..1usize << n).collect();
    masks.sort_by_key(|m| m.count_ones());
    for mask in masks {
        let fixed = (0..values.len()).filter(|&z| (z ^ x) & mask == 0);
        if fixed.into_iter().all(|z| values[z] == values[x]) {
            return mask.count_ones() as usize;
        }
    }
    unreachable!("the full mask is a certificate")
}

/// `(C0, C1)` of a total Boolean function.
pub fn c0_c1(values: &[u8], n: usize) -> (usize, usize) {
    let mut c = [0usize; 2];
    for x in 0..values.len() {
        let v = values[x] as usize;
        c[v] = c[v].max(cert_size(values, n, x));
    }
    (c[0], c[1])
}

pub fn values_of(id: u64, n: usize) -> Vec<u8> {
    (0..1usize << n).map(|i| (id >> i & 1) as u8).collect()
}

/// `(m, m', l, l', l_max)` of a relation given as `(x, y)` table indices of a
/// Boolean function on `n` variables.
pub fn relation_counts(pairs: &[(usize, usize)], n: usize) -> (u64, u64, u64, u64, u64) {
    let mut deg_x: HashMap<usize, u64> = HashMap::new();
    let mut deg_y: HashMap<usize, u64> = HashMap::new();
    let mut pos_x: HashMap<(usize, usize), u64> = HashMap::new();
    let mut pos_y: HashMap<(usize, usize), u64> = HashMap::new();
    for &(x, y) in pairs {
        *deg_x.entry(x).or_default() += 1;
        *deg_y.entry(y).or_default() += 1;
        for i in (0..n).filter(|&i| bit(x, i) != bit(y, i)) {
            *pos_x.entry((x, i)).or_default() += 1;
            *pos_y.entry((y, i)).or_default() += 1;
        }
    }
    let m = *deg_x.values().min().unwrap();
    let m_prime = *deg_y.values().min().unwrap();
    let l = *pos_x.values().max().unwrap();
    let l_prime = *pos_y.values().max().unwrap();
    let mut l_max = 0;
    for &(x, y) in pairs {
        for i in (0..n).filter(|&i| bit(x, i) != bit(y, i)) {
            l_max = l_max.max(pos_x[&(x, i)] * pos_y[&(y, i)]);
        }
    }
    (m, m_prime, l, l_prime, l_max)
}

/// A random non-constant total function on `n` variables and a random
/// nonempty subset of its full relation, as `(zero_index, one_index)` pairs.
pub fn random_relation(rng: &mut ChaCha8Rng, n: usize) -> (FunctionTable, Vec<(usize, usize)>) {
    let len = 1usize << n;
    let id = rng.gen_range(1..(1u64 << len) - 1);
    let f = FunctionTable::from_boolean_id(n, id).unwrap();
    let zeros: Vec<usize> = (0..len).filter(|&i| id >> i & 1 == 0).collect();
    let ones: Vec<usize> = (0..len).filter(|&i| id >> i & 1 == 1).collect();
    let mut all: Vec<(usize, usize)> = zeros
        .iter()
        .flat_map(|&x| ones.iter().map(move |&y| (x, y)))
        .collect();
    all.shuffle(rng);
    let keep = rng.gen_range(1..=all.len());
    all.truncate(keep);
    all.sort_unstable();
    (f, all)
}
