//! Sparse-neighbourhood recovery: recovers N(S) − T for a set T revealed only
//! at recovery time, provided |T| ≤ a, |N(S) − T| ≤ b and every vertex of
//! N(S) − T has fewer than c neighbours in S.
//!
//! The sketched vector is x(G, S): x_w is the number of edges from w into S,
//! reduced mod q = smallest prime > c, and 0 for w ∈ S. Levels of partial
//! recovery shrink T geometrically; a final exact decoder sized for the last
//! level's a + b picks up the rest.

mod exhaustive;
mod index;
mod schedule;

pub use exhaustive::ExhaustiveSnr;
pub use index::{IndexRecoverySketch, IrOutcome, PartialRecoveryMatrix, PartialRecoverySketch};
pub use schedule::{Level, Schedule, FIRST_GAMMA};

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::algebra::{smallest_prime_gt, PrimeField};
use crate::error::Error;
use crate::neighborhood::VertexSet;
use crate::recovery::FqSparseRecovery;
use crate::stream::{BitMeter, LinearSketch, StreamUpdate};
use crate::{ceil_log2, derive_seed};

const TAG_LEVEL: u64 = 0x60;
const TAG_GROUP: u64 = 0x61;

/// Randomness of an SNR sketch. Several sketches may share one matrix; its
/// seed bits are then charged once.
#[derive(Debug)]
pub struct SnrMatrix {
    n: u32,
    a: usize,
    b: usize,
    c: u64,
    q: PrimeField,
    schedule: Schedule,
    levels: Vec<PartialRecoveryMatrix>,
    seed: u64,
}

impl SnrMatrix {
    pub fn new(n: u32, a: usize, b: usize, c: u64, seed: u64) -> Result<Arc<Self>, Error> {
        if c < 2 {
            return Err(Error::InvalidParameter(format!("neighbour bound c must be >= 2 (got {c})")));
        }
        let schedule = Schedule::new(n, a, b)?;
        let q = PrimeField::new(smallest_prime_gt(c))?;
        let levels = schedule
            .levels()
            .iter()
            .enumerate()
            .map(|(j, l)| {
                let count = PartialRecoveryMatrix::count_for(l.a);
                PartialRecoveryMatrix::new(n, l.a, l.gamma, count, derive_seed(seed, TAG_LEVEL, j as u64))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Arc::new(SnrMatrix { n, a, b, c, q, schedule, levels, seed }))
    }

    pub fn universe(&self) -> u32 {
        self.n
    }

    pub fn params(&self) -> (usize, usize, u64) {
        (self.a, self.b, self.c)
    }

    pub fn q(&self) -> u64 {
        self.q.modulus()
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Sharing-group id under which the level hashes are charged.
    pub fn group(&self) -> u64 {
        derive_seed(self.seed, TAG_GROUP, 0)
    }

    /// Sketch and randomness bits of one copy, computed from the parameters
    /// alone. Randomness is returned as plain bits; callers decide sharing.
    pub fn nominal_bits(n: u32, a: usize, b: usize, c: u64) -> Result<(u64, u64), Error> {
        let schedule = Schedule::new(n, a, b)?;
        let q = smallest_prime_gt(c);
        let (mut sketch, mut random) = (0, 0);
        for l in schedule.levels() {
            let m = PartialRecoveryMatrix::nominal_meter(
                PartialRecoveryMatrix::count_for(l.a),
                PartialRecoveryMatrix::splits_for(l.gamma),
                q,
            );
            sketch += m.sketch_bits;
            random += m.randomness_bits;
        }
        let mut order = q;
        while order <= n as u64 {
            order *= q;
        }
        sketch += FqSparseRecovery::nominal_bits(schedule.final_sparsity(), ceil_log2(order));
        Ok((sketch, random))
    }
}

/// State at the start of one recovery level, for instrumentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelTrace {
    /// T_j (real vertices only).
    pub t: BTreeSet<u64>,
    /// Correction accumulated by earlier levels.
    pub y: BTreeMap<u64, u64>,
}

/// SNR sketch of x(G, S) for a fixed S.
#[derive(Clone, Debug)]
pub struct SnrSketch {
    matrix: Arc<SnrMatrix>,
    set: Arc<VertexSet>,
    levels: Vec<Vec<u64>>,
    last: FqSparseRecovery,
}

impl PartialEq for SnrSketch {
    fn eq(&self, other: &Self) -> bool {
        self.matrix.seed == other.matrix.seed && self.set == other.set && self.levels == other.levels && self.last == other.last
    }
}

impl SnrSketch {
    pub fn new(matrix: Arc<SnrMatrix>, set: Arc<VertexSet>) -> Result<Self, Error> {
        if set.universe() != matrix.n {
            return Err(Error::InvalidParameter("vertex set and matrix disagree on n".into()));
        }
        let levels = matrix.levels.iter().map(|l| vec![0; l.state_len()]).collect();
        let last = FqSparseRecovery::new(matrix.schedule.final_sparsity(), matrix.n as u64, matrix.q())?;
        Ok(SnrSketch { matrix, set, levels, last })
    }

    /// A sketch with its own private matrix.
    pub fn standalone(set: Arc<VertexSet>, a: usize, b: usize, c: u64, seed: u64) -> Result<Self, Error> {
        let matrix = SnrMatrix::new(set.universe(), a, b, c, seed)?;
        Self::new(matrix, set)
    }

    pub fn matrix(&self) -> &Arc<SnrMatrix> {
        &self.matrix
    }

    pub fn set(&self) -> &VertexSet {
        &self.set
    }

    /// Adds `delta` edges between `w` and S (w outside S).
    pub fn update_vertex(&mut self, w: u32, delta: i64) {
        let q = &self.matrix.q;
        let d = q.from_i64(delta);
        if d == 0 {
            return;
        }
        for (m, acc) in self.matrix.levels.iter().zip(&mut self.levels) {
            m.apply(acc, q, w as u64, d);
        }
        self.last.update_index(w as u64, d);
    }

    /// N(S) − T, sorted.
    pub fn recover(&self, t: &[u32]) -> Result<Vec<u32>, Error> {
        self.recover_traced(t).0
    }

    /// Recovery plus the state entering each level.
    pub fn recover_traced(&self, t: &[u32]) -> (Result<Vec<u32>, Error>, Vec<LevelTrace>) {
        let q = &self.matrix.q;
        let n = self.matrix.n as u64;
        let t_orig: BTreeSet<u64> = t.iter().map(|&v| v as u64).filter(|&v| v < n).collect();
        let mut t_cur = t_orig.clone();
        let mut y: BTreeMap<u64, u64> = BTreeMap::new();
        let mut trace = Vec::with_capacity(self.levels.len());
        for (m, acc) in self.matrix.levels.iter().zip(&self.levels) {
            trace.push(LevelTrace { t: t_cur.clone(), y: y.clone() });
            // sketch of the residual x − y, by linearity
            let mut residual = acc.clone();
            for (&i, &v) in &y {
                if v != 0 {
                    m.apply(&mut residual, q, i, q.neg(v));
                }
            }
            let (y_j, t_next) = m.recover(&residual, &t_cur);
            y.extend(y_j);
            t_cur = t_next;
        }
        let mut last = self.last.clone();
        for (&i, &v) in &y {
            if v != 0 {
                last.update_index(i, q.neg(v));
            }
        }
        let out = last.decode().map(|r| {
            for (i, v) in r {
                let slot = y.entry(i).or_insert(0);
                *slot = q.add(*slot, v);
            }
            y.iter().filter(|&(i, &v)| v != 0 && !t_orig.contains(i)).map(|(&i, _)| i as u32).collect()
        });
        (out, trace)
    }

    pub fn merge_from(&mut self, other: &Self) -> Result<(), Error> {
        if self.matrix.seed != other.matrix.seed || self.set != other.set {
            return Err(Error::MergeMismatch);
        }
        let q = &self.matrix.q;
        for (a, b) in self.levels.iter_mut().zip(&other.levels) {
            for (x, &y) in a.iter_mut().zip(b) {
                *x = q.add(*x, y);
            }
        }
        self.last.merge_from(&other.last)
    }

    /// Level hashes are charged to the matrix's sharing group.
    pub fn bit_meter(&self) -> BitMeter {
        let (a, b, c) = self.matrix.params();
        let (sketch, random) = SnrMatrix::nominal_bits(self.matrix.n, a, b, c).expect("built");
        BitMeter::new(sketch, 0) + BitMeter::shared(self.matrix.group(), random)
    }
}

impl LinearSketch for SnrSketch {
    fn update(&mut self, up: StreamUpdate) {
        if let Some((_, w)) = self.set.crossing(&up) {
            self.update_vertex(w, up.delta as i64);
        }
    }

    fn merge(&mut self, other: &Self) -> Result<(), Error> {
        self.merge_from(other)
    }

    fn meter(&self) -> BitMeter {
        self.bit_meter()
    }
}
