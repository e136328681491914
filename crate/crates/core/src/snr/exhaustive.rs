//! Exhaustive-search SNR: random inner products decoded by trying every
//! candidate allowed by the promises. Exponential time; a reference decoder
//! for tiny instances.

use std::sync::Arc;

use crate::algebra::{smallest_prime_gt, KWiseHash, PrimeField};
use crate::error::Error;
use crate::neighborhood::VertexSet;
use crate::stream::{BitMeter, LinearSketch, StreamUpdate};
use crate::{derive_seed, SEED_BITS};

const TAG_ROW: u64 = 0x70;

#[derive(Clone, Debug)]
pub struct ExhaustiveSnr {
    set: Arc<VertexSet>,
    a: usize,
    b: usize,
    c: u64,
    q: PrimeField,
    seed: u64,
    // rows[i][w]: expanded from the seed, not charged
    rows: Arc<Vec<Vec<u64>>>,
    products: Vec<u64>,
}

impl PartialEq for ExhaustiveSnr {
    fn eq(&self, other: &Self) -> bool {
        self.set == other.set && self.seed == other.seed && (self.a, self.b, self.c) == (other.a, other.b, other.c) && self.products == other.products
    }
}

impl ExhaustiveSnr {
    /// ⌈2·log₂(2^a·q^a·n^b·q^b·n^10) / log₂ q⌉ inner products.
    pub fn row_count(n: u32, a: usize, b: usize, q: u64) -> usize {
        let (lq, ln) = ((q as f64).log2(), (n as f64).log2());
        let bits = a as f64 + a as f64 * lq + b as f64 * ln + b as f64 * lq + 10.0 * ln;
        (2.0 * bits / lq).ceil() as usize
    }

    pub fn new(set: Arc<VertexSet>, a: usize, b: usize, c: u64, seed: u64) -> Result<Self, Error> {
        let n = set.universe();
        if n < 2 || c < 2 {
            return Err(Error::InvalidParameter(format!("exhaustive SNR needs n >= 2 and c >= 2 (n={n}, c={c})")));
        }
        let q = PrimeField::new(smallest_prime_gt(c))?;
        let rows = (0..Self::row_count(n, a, b, q.modulus()))
            .map(|i| {
                let h = KWiseHash::new(n as usize, n as u64, q.modulus(), derive_seed(seed, TAG_ROW, i as u64))?;
                Ok((0..n as u64).map(|w| h.eval_unchecked(w)).collect())
            })
            .collect::<Result<Vec<Vec<u64>>, Error>>()?;
        let products = vec![0; rows.len()];
        Ok(ExhaustiveSnr { set, a, b, c, q, seed, rows: Arc::new(rows), products })
    }

    pub fn rows(&self) -> usize {
        self.products.len()
    }

    pub fn update_vertex(&mut self, w: u32, delta: i64) {
        let d = self.q.from_i64(delta);
        for (z, row) in self.products.iter_mut().zip(self.rows.iter()) {
            *z = self.q.add(*z, self.q.mul(d, row[w as usize]));
        }
    }

    /// Number of outside-T candidate patterns the search would try.
    pub fn work(&self, t: &[u32]) -> u128 {
        let outside = self.outside_pool(t).len() as u128;
        let mut total = 0u128;
        let mut binom = 1u128;
        let mut values = 1u128;
        for k in 0..=self.b as u128 {
            if k > outside {
                break;
            }
            total = total.saturating_add(binom.saturating_mul(values));
            binom = binom.saturating_mul(outside - k) / (k + 1);
            values = values.saturating_mul(self.c as u128 - 1);
        }
        total
    }

    fn outside_pool(&self, t: &[u32]) -> Vec<u32> {
        let n = self.set.universe();
        let mut in_t = vec![false; n as usize];
        for &v in t {
            if v < n {
                in_t[v as usize] = true;
            }
        }
        (0..n).filter(|&w| !in_t[w as usize] && !self.set.contains(w)).collect()
    }

    /// Tries every outside support of size ≤ b with values in 1..c, smallest
    /// first, and solves for the coordinates inside T.
    pub fn recover(&self, t: &[u32], work_bound: u128) -> Result<Vec<u32>, Error> {
        let needed = self.work(t);
        if needed > work_bound {
            return Err(Error::WorkBoundExceeded { needed, bound: work_bound });
        }
        let n = self.set.universe();
        let mut inside: Vec<u32> = t.iter().copied().filter(|&v| v < n && !self.set.contains(v)).collect();
        inside.sort_unstable();
        inside.dedup();
        let pool = self.outside_pool(t);
        let null = self.left_null_space(&inside);
        let f = &self.q;
        let project = |col: &dyn Fn(usize) -> u64| -> Vec<u64> {
            null.iter().map(|w| w.iter().enumerate().fold(0, |acc, (i, &wi)| f.add(acc, f.mul(wi, col(i))))).collect()
        };
        let target = project(&|i| self.products[i]);
        let cols: Vec<Vec<u64>> = pool.iter().map(|&p| project(&|i| self.rows[i][p as usize])).collect();

        let mut chosen: Vec<usize> = Vec::new();
        for k in 0..=self.b.min(pool.len()) {
            chosen.clear();
            chosen.extend(0..k);
            loop {
                let mut vals = vec![1u64; k];
                loop {
                    let mut r = target.clone();
                    for (&p, &v) in chosen.iter().zip(&vals) {
                        for (x, &c) in r.iter_mut().zip(&cols[p]) {
                            *x = f.sub(*x, f.mul(v, c));
                        }
                    }
                    if r.iter().all(|&x| x == 0) {
                        return Ok(chosen.iter().map(|&p| pool[p]).collect());
                    }
                    if !next_values(&mut vals, self.c - 1) {
                        break;
                    }
                }
                if !next_combination(&mut chosen, pool.len()) {
                    break;
                }
            }
        }
        Err(Error::NoCandidate)
    }

    /// Basis of {w : wᵀ A_T = 0} where A_T holds the row entries of T's columns.
    fn left_null_space(&self, inside: &[u32]) -> Vec<Vec<u64>> {
        let f = &self.q;
        let s = self.rows();
        let m = inside.len();
        let mut mat: Vec<Vec<u64>> = (0..s)
            .map(|i| {
                let mut row: Vec<u64> = inside.iter().map(|&v| self.rows[i][v as usize]).collect();
                row.extend((0..s).map(|j| (i == j) as u64));
                row
            })
            .collect();
        let mut pivot_row = 0;
        for col in 0..m {
            let Some(p) = (pivot_row..s).find(|&r| mat[r][col] != 0) else { continue };
            mat.swap(pivot_row, p);
            let inv = f.inv(mat[pivot_row][col]).expect("nonzero pivot");
            for x in mat[pivot_row].iter_mut() {
                *x = f.mul(*x, inv);
            }
            let pivot = mat[pivot_row].clone();
            for (r, row) in mat.iter_mut().enumerate() {
                if r != pivot_row && row[col] != 0 {
                    let factor = row[col];
                    for (x, &pv) in row.iter_mut().zip(&pivot) {
                        *x = f.sub(*x, f.mul(factor, pv));
                    }
                }
            }
            pivot_row += 1;
        }
        mat.into_iter().skip(pivot_row).map(|row| row[m..].to_vec()).collect()
    }

    /// s_eq·⌈log₂ q⌉ sketch bits; the rows cost only their seed.
    pub fn bit_meter(&self) -> BitMeter {
        BitMeter::new(self.rows() as u64 * self.q.element_bits(), SEED_BITS)
    }
}

/// Odometer over [1, max]^k.
fn next_values(vals: &mut [u64], max: u64) -> bool {
    for v in vals.iter_mut() {
        if *v < max {
            *v += 1;
            return true;
        }
        *v = 1;
    }
    false
}

/// Next k-subset of [0, n) in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

impl LinearSketch for ExhaustiveSnr {
    fn update(&mut self, up: StreamUpdate) {
        if let Some((_, w)) = self.set.crossing(&up) {
            self.update_vertex(w, up.delta as i64);
        }
    }

    fn merge(&mut self, other: &Self) -> Result<(), Error> {
        if self.set != other.set || self.seed != other.seed || self.rows() != other.rows() {
            return Err(Error::MergeMismatch);
        }
        for (a, &b) in self.products.iter_mut().zip(&other.products) {
            *a = self.q.add(*a, b);
        }
        Ok(())
    }

    fn meter(&self) -> BitMeter {
        self.bit_meter()
    }
}
