//! Index recovery and partial recovery over F_q.
//!
//! An index-recovery sketch keeps z = Σ_{i∈H} x_i for a random set H of
//! density 1/(2a) and a few split tests that partition H in two. Given T it
//! returns (i, x_i) when H ∩ T = {i} and no split test sees mass on both
//! sides. A partial-recovery sketch runs many of them and collects the
//! successes.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::algebra::{KWiseHash, PrimeField};
use crate::error::Error;
use crate::stream::BitMeter;
use crate::{ceil_log2, derive_seed};

const TAG_SELECT: u64 = 0x50;
const TAG_SPLIT: u64 = 0x51;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IrOutcome {
    Found { index: u64, value: u64 },
    Fail,
}

/// Randomness of a batch of index-recovery sketches sharing (a, γ).
///
/// Hash domain is [n + ⌈a⌉]: indices ≥ n are dummies used to pad T.
#[derive(Clone, Debug)]
pub struct PartialRecoveryMatrix {
    n: u32,
    a: f64,
    gamma: f64,
    pad: usize,
    splits: usize,
    select: Vec<KWiseHash>,
    split: Vec<KWiseHash>,
    // vertex -> ids of the sketches whose H contains it
    offsets: Vec<u32>,
    members: Vec<u32>,
    seed: u64,
}

impl PartialRecoveryMatrix {
    /// ⌈5a·ln 8⌉ sketches.
    pub fn count_for(a: f64) -> usize {
        (5.0 * a * 8f64.ln()).ceil() as usize
    }

    /// ⌈log₂(1/γ)⌉ split tests per sketch.
    pub fn splits_for(gamma: f64) -> usize {
        (1.0 / gamma).log2().ceil() as usize
    }

    pub fn new(n: u32, a: f64, gamma: f64, count: usize, seed: u64) -> Result<Self, Error> {
        if n == 0 || !(a >= 1.0) || !(gamma > 0.0 && gamma < 1.0) || count == 0 {
            return Err(Error::InvalidParameter(format!(
                "index recovery needs n, count >= 1, a >= 1, 0 < γ < 1 (n={n}, a={a}, γ={gamma}, count={count})"
            )));
        }
        let pad = a.ceil() as usize;
        let domain = n as u64 + pad as u64;
        let range = (2.0 * a).ceil() as u64;
        let splits = Self::splits_for(gamma);
        let select = (0..count)
            .map(|r| KWiseHash::new(2, domain, range, derive_seed(seed, TAG_SELECT, r as u64)))
            .collect::<Result<Vec<_>, _>>()?;
        let split = (0..count * splits)
            .map(|r| KWiseHash::new(2, domain, 2, derive_seed(seed, TAG_SPLIT, r as u64)))
            .collect::<Result<Vec<_>, _>>()?;

        let mut per_vertex: Vec<Vec<u32>> = vec![Vec::new(); domain as usize];
        for (r, h) in select.iter().enumerate() {
            for x in 0..domain {
                if h.eval_unchecked(x) == 0 {
                    per_vertex[x as usize].push(r as u32);
                }
            }
        }
        let mut offsets = Vec::with_capacity(domain as usize + 1);
        let mut members = Vec::new();
        offsets.push(0);
        for list in per_vertex {
            members.extend(list);
            offsets.push(members.len() as u32);
        }
        Ok(PartialRecoveryMatrix { n, a, gamma, pad, splits, select, split, offsets, members, seed })
    }

    pub fn sketch_count(&self) -> usize {
        self.select.len()
    }

    pub fn splits(&self) -> usize {
        self.splits
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn stride(&self) -> usize {
        1 + 2 * self.splits
    }

    /// Accumulator length for one sketch state.
    pub fn state_len(&self) -> usize {
        self.sketch_count() * self.stride()
    }

    /// Sketches whose H contains index `i`.
    #[inline]
    pub fn sketches_of(&self, i: u64) -> &[u32] {
        let i = i as usize;
        &self.members[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }

    /// Adds `d` ∈ F_q at index `i` to an accumulator.
    #[inline]
    pub fn apply(&self, acc: &mut [u64], q: &PrimeField, i: u64, d: u64) {
        let stride = self.stride();
        for &r in self.sketches_of(i) {
            let base = r as usize * stride;
            acc[base] = q.add(acc[base], d);
            for s in 0..self.splits {
                let side = self.split[r as usize * self.splits + s].eval_unchecked(i) as usize;
                let slot = base + 1 + 2 * s + side;
                acc[slot] = q.add(acc[slot], d);
            }
        }
    }

    /// Real vertices of T (below n) padded with dummies up to ⌈a⌉ elements.
    pub fn padded(&self, t: &BTreeSet<u64>) -> BTreeSet<u64> {
        let n = self.n as u64;
        let mut out: BTreeSet<u64> = t.iter().copied().filter(|&i| i < n).collect();
        let mut dummy = n;
        while out.len() < self.pad {
            out.insert(dummy);
            dummy += 1;
        }
        out
    }

    fn judge(&self, acc: &[u64], r: usize, index: u64) -> IrOutcome {
        let base = r * self.stride();
        for s in 0..self.splits {
            if acc[base + 1 + 2 * s] != 0 && acc[base + 2 + 2 * s] != 0 {
                return IrOutcome::Fail;
            }
        }
        IrOutcome::Found { index, value: acc[base] }
    }

    /// Runs sketch `r` alone against an already padded T.
    pub fn index_recover(&self, acc: &[u64], r: usize, padded: &BTreeSet<u64>) -> IrOutcome {
        let mut hit = None;
        for &i in padded {
            if self.select[r].eval_unchecked(i) == 0 {
                if hit.is_some() {
                    return IrOutcome::Fail;
                }
                hit = Some(i);
            }
        }
        match hit {
            Some(i) => self.judge(acc, r, i),
            None => IrOutcome::Fail,
        }
    }

    /// Runs every sketch; returns the correction y (real indices only) and T_y.
    pub fn recover(&self, acc: &[u64], t: &BTreeSet<u64>) -> (BTreeMap<u64, u64>, BTreeSet<u64>) {
        let padded = self.padded(t);
        let count = self.sketch_count();
        let mut hits = vec![0u32; count];
        let mut who = vec![0u64; count];
        for &i in &padded {
            for &r in self.sketches_of(i) {
                hits[r as usize] += 1;
                who[r as usize] = i;
            }
        }
        let mut y = BTreeMap::new();
        let mut t_y: BTreeSet<u64> = t.iter().copied().filter(|&i| i < self.n as u64).collect();
        for r in 0..count {
            if hits[r] != 1 {
                continue;
            }
            if let IrOutcome::Found { index, value } = self.judge(acc, r, who[r]) {
                if index < self.n as u64 {
                    y.insert(index, value);
                    t_y.remove(&index);
                }
            }
        }
        (y, t_y)
    }

    /// Meter of one state over F_q with this matrix's shape, randomness included.
    pub fn nominal_meter(count: usize, splits: usize, q: u64) -> BitMeter {
        let stride = 1 + 2 * splits as u64;
        BitMeter::new(
            count as u64 * stride * ceil_log2(q),
            count as u64 * (1 + splits as u64) * KWiseHash::nominal_bits(2),
        )
    }
}

/// Standalone partial recovery of an F_q vector indexed by [n].
#[derive(Clone, Debug)]
pub struct PartialRecoverySketch {
    matrix: Arc<PartialRecoveryMatrix>,
    q: PrimeField,
    acc: Vec<u64>,
}

impl PartialEq for PartialRecoverySketch {
    fn eq(&self, other: &Self) -> bool {
        self.matrix.seed == other.matrix.seed && self.q == other.q && self.acc == other.acc
    }
}

impl PartialRecoverySketch {
    /// ⌈5a·ln 8⌉ index-recovery sketches with parameters (a, γ) over F_q.
    pub fn new(n: u32, a: usize, gamma: f64, q: u64, seed: u64) -> Result<Self, Error> {
        let count = PartialRecoveryMatrix::count_for(a as f64);
        Self::with_count(n, a, gamma, q, count, seed)
    }

    fn with_count(n: u32, a: usize, gamma: f64, q: u64, count: usize, seed: u64) -> Result<Self, Error> {
        let q = PrimeField::new(q)?;
        let matrix = Arc::new(PartialRecoveryMatrix::new(n, a as f64, gamma, count, seed)?);
        let acc = vec![0; matrix.state_len()];
        Ok(PartialRecoverySketch { matrix, q, acc })
    }

    pub fn matrix(&self) -> &PartialRecoveryMatrix {
        &self.matrix
    }

    /// Adds a signed amount (reduced mod q) at index `i` < n.
    pub fn update_index(&mut self, i: u64, delta: i64) {
        assert!(i < self.matrix.n as u64, "index {i} outside [0, {})", self.matrix.n);
        let d = self.q.from_i64(delta);
        if d != 0 {
            self.matrix.apply(&mut self.acc, &self.q, i, d);
        }
    }

    pub fn recover(&self, t: &[u32]) -> (BTreeMap<u64, u64>, BTreeSet<u64>) {
        let t: BTreeSet<u64> = t.iter().map(|&v| v as u64).collect();
        self.matrix.recover(&self.acc, &t)
    }

    pub fn merge_from(&mut self, other: &Self) -> Result<(), Error> {
        if self.matrix.seed != other.matrix.seed || self.q != other.q || self.acc.len() != other.acc.len() {
            return Err(Error::MergeMismatch);
        }
        for (a, &b) in self.acc.iter_mut().zip(&other.acc) {
            *a = self.q.add(*a, b);
        }
        Ok(())
    }

    pub fn bit_meter(&self) -> BitMeter {
        PartialRecoveryMatrix::nominal_meter(self.matrix.sketch_count(), self.matrix.splits, self.q.modulus())
    }
}

/// A single index-recovery sketch.
#[derive(Clone, Debug, PartialEq)]
pub struct IndexRecoverySketch(PartialRecoverySketch);

impl IndexRecoverySketch {
    pub fn new(n: u32, a: usize, gamma: f64, q: u64, seed: u64) -> Result<Self, Error> {
        PartialRecoverySketch::with_count(n, a, gamma, q, 1, seed).map(IndexRecoverySketch)
    }

    pub fn update_index(&mut self, i: u64, delta: i64) {
        self.0.update_index(i, delta)
    }

    /// T is padded to exactly ⌈a⌉ before testing.
    pub fn recover(&self, t: &[u32]) -> IrOutcome {
        let t: BTreeSet<u64> = t.iter().map(|&v| v as u64).collect();
        let m = &self.0.matrix;
        m.index_recover(&self.0.acc, 0, &m.padded(&t))
    }

    pub fn merge_from(&mut self, other: &Self) -> Result<(), Error> {
        self.0.merge_from(&other.0)
    }

    pub fn bit_meter(&self) -> BitMeter {
        self.0.bit_meter()
    }
}
