//! Small extension fields F_{q^e} with Zech-logarithm tables.
//!
//! Nonzero elements are stored as discrete logs to a primitive element g, so
//! multiplication is an index add and addition is one table lookup.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::prime::is_prime;
use crate::error::Error;

/// Largest field order we build tables for.
pub const MAX_ORDER: u64 = 1 << 22;

/// An element of F_{q^e} in log form; `ExtElem::ZERO` is the zero element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ExtElem(u32);

impl ExtElem {
    pub const ZERO: ExtElem = ExtElem(u32::MAX);

    pub fn is_zero(self) -> bool {
        self == ExtElem::ZERO
    }
}

#[derive(Debug)]
pub struct ExtField {
    q: u64,
    e: u32,
    order: u64,
    /// `exp[i]` is the digit index of g^i.
    exp: Vec<u32>,
    /// `log[d]` is the log of the element with digit index d (unused at 0).
    log: Vec<u32>,
    /// `zech[i]` is log(1 + g^i).
    zech: Vec<u32>,
    log_minus_one: u32,
}

fn cache() -> &'static Mutex<HashMap<(u64, u32), Arc<ExtField>>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u32), Arc<ExtField>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn digits_to_index(d: &[u64], q: u64) -> u64 {
    d.iter().rev().fold(0, |acc, &x| acc * q + x)
}

fn index_to_digits(mut idx: u64, q: u64, e: usize) -> Vec<u64> {
    let mut d = vec![0; e];
    for slot in d.iter_mut() {
        *slot = idx % q;
        idx /= q;
    }
    d
}

impl ExtField {
    /// The smallest extension F_{q^e} whose order exceeds `m`.
    pub fn covering(q: u64, m: u64) -> Result<Arc<ExtField>, Error> {
        let mut e = 1u32;
        let mut order = q;
        while order <= m {
            order = order.checked_mul(q).ok_or_else(|| Error::InvalidParameter("field too large".into()))?;
            e += 1;
        }
        ExtField::get(q, e)
    }

    /// Shared tables for F_{q^e}, built once per process.
    pub fn get(q: u64, e: u32) -> Result<Arc<ExtField>, Error> {
        if let Some(f) = cache().lock().unwrap().get(&(q, e)) {
            return Ok(f.clone());
        }
        let f = Arc::new(ExtField::build(q, e)?);
        cache().lock().unwrap().insert((q, e), f.clone());
        Ok(f)
    }

    fn build(q: u64, e: u32) -> Result<ExtField, Error> {
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        let order = q
            .checked_pow(e)
            .filter(|&o| o <= MAX_ORDER && e >= 1)
            .ok_or_else(|| Error::InvalidParameter(format!("F_{q}^{e} is too large for tables")))?;
        let e_us = e as usize;
        let n_units = (order - 1) as usize;
        let mut exp = vec![0u32; n_units];
        // Search monic x^e = r(x) with r(0) != 0 until x has order q^e - 1.
        let mut found = false;
        'candidate: for r_idx in 1..order {
            let r = index_to_digits(r_idx, q, e_us);
            if r[0] == 0 {
                continue;
            }
            let mut cur = vec![0u64; e_us];
            cur[0] = 1;
            for (i, slot) in exp.iter_mut().enumerate() {
                let idx = digits_to_index(&cur, q);
                if i > 0 && idx == 1 {
                    continue 'candidate;
                }
                *slot = idx as u32;
                // cur <- cur * x mod (x^e - r)
                let top = cur[e_us - 1];
                for j in (1..e_us).rev() {
                    cur[j] = cur[j - 1];
                }
                cur[0] = 0;
                for j in 0..e_us {
                    cur[j] = (cur[j] + top * r[j]) % q;
                }
            }
            if digits_to_index(&cur, q) == 1 {
                found = true;
                break;
            }
        }
        if !found {
            return Err(Error::InvalidParameter(format!("no primitive polynomial for F_{q}^{e}")));
        }
        let mut log = vec![u32::MAX; order as usize];
        for (i, &d) in exp.iter().enumerate() {
            log[d as usize] = i as u32;
        }
        let zech = exp
            .iter()
            .map(|&d| {
                let mut dig = index_to_digits(d as u64, q, e_us);
                dig[0] = (dig[0] + 1) % q;
                let idx = digits_to_index(&dig, q);
                if idx == 0 {
                    u32::MAX
                } else {
                    log[idx as usize]
                }
            })
            .collect();
        let log_minus_one = log[(q - 1) as usize];
        Ok(ExtField { q, e, order, exp, log, zech, log_minus_one })
    }

    pub fn characteristic(&self) -> u64 {
        self.q
    }

    pub fn degree(&self) -> u32 {
        self.e
    }

    /// Number of field elements q^e.
    pub fn order(&self) -> u64 {
        self.order
    }

    /// ⌈log₂ q^e⌉ bits per stored element.
    pub fn element_bits(&self) -> u64 {
        crate::ceil_log2(self.order)
    }

    #[inline]
    fn units(&self) -> u32 {
        (self.order - 1) as u32
    }

    #[inline]
    fn wrap(&self, x: u64) -> u32 {
        (x % (self.order - 1)) as u32
    }

    /// g^i for the fixed primitive element g.
    #[inline]
    pub fn gen_pow(&self, i: u64) -> ExtElem {
        ExtElem(self.wrap(i))
    }

    pub fn one(&self) -> ExtElem {
        ExtElem(0)
    }

    /// Embeds v ∈ F_q as a constant.
    #[inline]
    pub fn from_base(&self, v: u64) -> ExtElem {
        let v = v % self.q;
        if v == 0 {
            ExtElem::ZERO
        } else {
            ExtElem(self.log[v as usize])
        }
    }

    /// The F_q value of `x`, if it lies in the prime subfield.
    pub fn to_base(&self, x: ExtElem) -> Option<u64> {
        if x.is_zero() {
            return Some(0);
        }
        let d = self.exp[x.0 as usize] as u64;
        (d < self.q).then_some(d)
    }

    #[inline]
    pub fn mul(&self, a: ExtElem, b: ExtElem) -> ExtElem {
        if a.is_zero() || b.is_zero() {
            return ExtElem::ZERO;
        }
        ExtElem(self.wrap(a.0 as u64 + b.0 as u64))
    }

    pub fn inv(&self, a: ExtElem) -> Result<ExtElem, Error> {
        if a.is_zero() {
            return Err(Error::InverseOfZero);
        }
        Ok(ExtElem(self.wrap((self.units() - a.0) as u64)))
    }

    pub fn pow(&self, a: ExtElem, k: u64) -> ExtElem {
        if a.is_zero() {
            return if k == 0 { self.one() } else { ExtElem::ZERO };
        }
        ExtElem(((a.0 as u128 * k as u128) % self.units() as u128) as u32)
    }

    #[inline]
    pub fn add(&self, a: ExtElem, b: ExtElem) -> ExtElem {
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        let u = self.units();
        let d = if b.0 >= a.0 { b.0 - a.0 } else { b.0 + u - a.0 };
        let z = self.zech[d as usize];
        if z == u32::MAX {
            ExtElem::ZERO
        } else {
            ExtElem(self.wrap(a.0 as u64 + z as u64))
        }
    }

    #[inline]
    pub fn neg(&self, a: ExtElem) -> ExtElem {
        self.mul(a, ExtElem(self.log_minus_one))
    }

    #[inline]
    pub fn sub(&self, a: ExtElem, b: ExtElem) -> ExtElem {
        self.add(a, self.neg(b))
    }

    /// The integer `k` as a field element (k · 1).
    pub fn scalar(&self, k: u64) -> ExtElem {
        self.from_base(k % self.q)
    }
}
