//! Deterministic k-sparse recovery over F_q by syndrome decoding.
//!
//! Coordinate j is associated with the point ω_j = g^j of F_{q^e}; the sketch
//! keeps the 2k power sums s_r = Σ x_j ω_j^r, r = 1..2k.

use std::sync::Arc;

use crate::algebra::{is_prime, ExtElem, ExtField};
use crate::error::Error;
use crate::stream::BitMeter;

#[derive(Clone, Debug)]
pub struct FqSparseRecovery {
    k: usize,
    m: u64,
    field: Arc<ExtField>,
    syndromes: Vec<ExtElem>,
}

impl PartialEq for FqSparseRecovery {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k && self.m == other.m && self.field.order() == other.field.order() && self.syndromes == other.syndromes
    }
}

impl FqSparseRecovery {
    /// Recovers vectors in F_q^m with at most `k` nonzeros.
    pub fn new(k: usize, m: u64, q: u64) -> Result<Self, Error> {
        if k == 0 || m == 0 || !is_prime(q) {
            return Err(Error::InvalidParameter(format!("sparse recovery needs k, m >= 1 and prime q (k={k}, m={m}, q={q})")));
        }
        let field = ExtField::covering(q, m)?;
        Ok(FqSparseRecovery { k, m, syndromes: vec![ExtElem::ZERO; 2 * k], field })
    }

    pub fn sparsity(&self) -> usize {
        self.k
    }

    pub fn domain(&self) -> u64 {
        self.m
    }

    pub fn q(&self) -> u64 {
        self.field.characteristic()
    }

    pub fn field(&self) -> &ExtField {
        &self.field
    }

    /// Adds `delta` (an element of F_q) to coordinate `j`.
    pub fn update_index(&mut self, j: u64, delta: u64) {
        assert!(j < self.m, "index {j} outside [0, {})", self.m);
        let f = &*self.field;
        let d = f.from_base(delta);
        if d.is_zero() {
            return;
        }
        let w = f.gen_pow(j);
        let mut term = f.mul(d, w);
        for s in self.syndromes.iter_mut() {
            *s = f.add(*s, term);
            term = f.mul(term, w);
        }
    }

    /// Adds a signed integer to coordinate `j`, reduced mod q.
    pub fn update_signed(&mut self, j: u64, delta: i64) {
        let q = self.q() as i64;
        self.update_index(j, delta.rem_euclid(q) as u64);
    }

    pub fn merge_from(&mut self, other: &Self) -> Result<(), Error> {
        if self.k != other.k || self.m != other.m || self.q() != other.q() {
            return Err(Error::MergeMismatch);
        }
        let f = &*self.field;
        for (a, &b) in self.syndromes.iter_mut().zip(&other.syndromes) {
            *a = f.add(*a, b);
        }
        Ok(())
    }

    /// Subtracts another sketch's state (same shape).
    pub fn subtract(&mut self, other: &Self) -> Result<(), Error> {
        if self.k != other.k || self.m != other.m || self.q() != other.q() {
            return Err(Error::MergeMismatch);
        }
        let f = &*self.field;
        for (a, &b) in self.syndromes.iter_mut().zip(&other.syndromes) {
            *a = f.sub(*a, b);
        }
        Ok(())
    }

    /// 2k stored elements of F_{q^e}; no randomness.
    pub fn bit_meter(&self) -> BitMeter {
        BitMeter::new(Self::nominal_bits(self.k, self.field.element_bits()), 0)
    }

    pub fn nominal_bits(k: usize, element_bits: u64) -> u64 {
        2 * k as u64 * element_bits
    }

    /// Returns the nonzero coordinates as (index, value) sorted by index.
    pub fn decode(&self) -> Result<Vec<(u64, u64)>, Error> {
        let f = &*self.field;
        if self.syndromes.iter().all(|s| s.is_zero()) {
            return Ok(Vec::new());
        }
        let locator = berlekamp_massey(f, &self.syndromes);
        let l = locator.len() - 1;
        if l == 0 || l > self.k {
            return Err(Error::RecoveryFailed);
        }
        let roots = self.find_roots(&locator);
        if roots.len() != l {
            return Err(Error::RecoveryFailed);
        }
        // Ω = S·Λ mod z^l suffices since deg Ω < l.
        let mut omega = vec![ExtElem::ZERO; l];
        for (i, slot) in omega.iter_mut().enumerate() {
            for j in 0..=i {
                *slot = f.add(*slot, f.mul(self.syndromes[i - j], locator[j]));
            }
        }
        let deriv: Vec<ExtElem> = (1..=l).map(|i| f.mul(f.scalar(i as u64), locator[i])).collect();
        let mut out = Vec::with_capacity(l);
        for &j in &roots {
            let x_inv = f.inv(f.gen_pow(j)).expect("nonzero");
            let num = eval(f, &omega, x_inv);
            let den = eval(f, &deriv, x_inv);
            if den.is_zero() {
                return Err(Error::RecoveryFailed);
            }
            let val = f.neg(f.mul(num, f.inv(den)?));
            match f.to_base(val) {
                Some(v) if v != 0 => out.push((j, v)),
                _ => return Err(Error::RecoveryFailed),
            }
        }
        // Re-sketch the answer and compare every syndrome.
        let mut check = FqSparseRecovery { syndromes: vec![ExtElem::ZERO; 2 * self.k], ..self.clone() };
        for &(j, v) in &out {
            check.update_index(j, v);
        }
        if check.syndromes != self.syndromes {
            return Err(Error::RecoveryFailed);
        }
        Ok(out)
    }

    /// Indices j < m with Λ(ω_j^{-1}) = 0, by direct evaluation.
    fn find_roots(&self, locator: &[ExtElem]) -> Vec<u64> {
        let f = &*self.field;
        let units = f.order() - 1;
        let mut roots = Vec::new();
        for j in 0..self.m {
            // term i is Λ_i · g^{-j i}
            let step = f.gen_pow(units - j % units);
            let mut acc = ExtElem::ZERO;
            let mut pw = f.one();
            for &c in locator {
                acc = f.add(acc, f.mul(c, pw));
                pw = f.mul(pw, step);
            }
            if acc.is_zero() {
                roots.push(j);
                if roots.len() == locator.len() - 1 {
                    break;
                }
            }
        }
        roots
    }
}

fn eval(f: &ExtField, poly: &[ExtElem], x: ExtElem) -> ExtElem {
    poly.iter().rev().fold(ExtElem::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
}

/// Shortest linear recurrence (connection polynomial, constant term 1).
fn berlekamp_massey(f: &ExtField, s: &[ExtElem]) -> Vec<ExtElem> {
    let mut c = vec![f.one()];
    let mut b = vec![f.one()];
    let mut l = 0usize;
    let mut shift = 1usize;
    let mut b_disc = f.one();
    for n in 0..s.len() {
        let mut d = s[n];
        for i in 1..=l.min(c.len() - 1) {
            d = f.add(d, f.mul(c[i], s[n - i]));
        }
        if d.is_zero() {
            shift += 1;
            continue;
        }
        let coef = f.mul(d, f.inv(b_disc).expect("nonzero"));
        let prev = c.clone();
        if c.len() < b.len() + shift {
            c.resize(b.len() + shift, ExtElem::ZERO);
        }
        for (i, &bi) in b.iter().enumerate() {
            c[i + shift] = f.sub(c[i + shift], f.mul(coef, bi));
        }
        if 2 * l <= n {
            l = n + 1 - l;
            b = prev;
            b_disc = d;
            shift = 1;
        } else {
            shift += 1;
        }
    }
    c.truncate(l + 1);
    c.resize(l + 1, ExtElem::ZERO);
    c
}
