//! Deciding whether |N(S) ∩ T| = 1 with one-sided error.

use std::sync::Arc;

use super::VertexSet;
use crate::algebra::KWiseHash;
use crate::error::Error;
use crate::stream::{BitMeter, LinearSketch, StreamUpdate};
use crate::{ceil_log2, derive_seed};

const TAG_SPLIT: u64 = 0x20;
const BITS_PER_HASH: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CounterAnswer {
    One,
    NotOne,
}

/// The counters of an NE-Counter without the sets: each of `t` iterations
/// splits the vertices in two with a pairwise hash and counts edges per side.
///
/// Iteration i uses bit i of pairwise hashes into [2^60]; for two distinct
/// vertices those bits agree in all t iterations with probability 2^-t.
#[derive(Clone, Debug)]
pub struct SplitCounter {
    n: u32,
    t: usize,
    seed: u64,
    hashes: Vec<KWiseHash>,
    counts: Vec<i64>,
}

impl PartialEq for SplitCounter {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.t == other.t && self.seed == other.seed && self.counts == other.counts
    }
}

impl SplitCounter {
    /// Error probability δ_E on inputs with two or more neighbours.
    pub fn new(n: u32, delta_err: f64, seed: u64) -> Result<Self, Error> {
        if n == 0 || !(delta_err > 0.0 && delta_err < 1.0) {
            return Err(Error::InvalidParameter("counter needs n >= 1 and δ_E in (0, 1)".into()));
        }
        let t = Self::iterations(delta_err);
        let hashes = (0..t.div_ceil(BITS_PER_HASH))
            .map(|i| KWiseHash::new(2, n as u64, 1 << BITS_PER_HASH, derive_seed(seed, TAG_SPLIT, i as u64)).expect("valid"))
            .collect();
        Ok(SplitCounter { n, t, seed, hashes, counts: vec![0; 2 * t] })
    }

    /// t = ⌈log₂(1/δ_E)⌉.
    pub fn iterations(delta_err: f64) -> usize {
        ((1.0 / delta_err).log2().ceil() as usize).max(1)
    }

    /// Records `delta` edges between S and vertex `w` of T.
    pub fn update_vertex(&mut self, w: u32, delta: i64) {
        for (h, counts) in self.hashes.iter().zip(self.counts.chunks_mut(2 * BITS_PER_HASH)) {
            let bits = h.eval_unchecked(w as u64);
            for (i, pair) in counts.chunks_exact_mut(2).enumerate() {
                pair[((bits >> i) & 1) as usize] += delta;
            }
        }
    }

    pub fn query(&self) -> CounterAnswer {
        for pair in self.counts.chunks_exact(2) {
            if (pair[0] == 0) == (pair[1] == 0) {
                return CounterAnswer::NotOne;
            }
        }
        CounterAnswer::One
    }

    pub fn is_zero(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    pub fn merge_from(&mut self, other: &Self) -> Result<(), Error> {
        if self.n != other.n || self.t != other.t || self.seed != other.seed {
            return Err(Error::MergeMismatch);
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        Ok(())
    }

    /// Signed counters wide enough for n² edges.
    pub fn counter_bits(n: u32) -> u64 {
        2 * ceil_log2(n as u64 + 1) + 1
    }

    pub fn nominal_meter(n: u32, delta_err: f64) -> BitMeter {
        let t = Self::iterations(delta_err);
        BitMeter::new(
            2 * t as u64 * Self::counter_bits(n),
            t.div_ceil(BITS_PER_HASH) as u64 * KWiseHash::nominal_bits(2),
        )
    }

    pub fn bit_meter(&self) -> BitMeter {
        BitMeter::new(
            self.counts.len() as u64 * Self::counter_bits(self.n),
            self.hashes.iter().map(|h| h.bits()).sum(),
        )
    }
}

/// NE-Counter for fixed sets S and T.
#[derive(Clone, Debug, PartialEq)]
pub struct NECounter {
    s: Arc<VertexSet>,
    t: Arc<VertexSet>,
    counter: SplitCounter,
}

impl NECounter {
    pub fn new(s: Arc<VertexSet>, t: Arc<VertexSet>, delta_err: f64, seed: u64) -> Result<Self, Error> {
        let counter = SplitCounter::new(s.universe(), delta_err, seed)?;
        Ok(NECounter { s, t, counter })
    }

    pub fn query(&self) -> CounterAnswer {
        self.counter.query()
    }
}

impl LinearSketch for NECounter {
    fn update(&mut self, up: StreamUpdate) {
        if let Some((_, w)) = self.s.crossing(&up) {
            if self.t.contains(w) {
                self.counter.update_vertex(w, up.delta as i64);
            }
        }
    }

    fn merge(&mut self, other: &Self) -> Result<(), Error> {
        if self.s != other.s || self.t != other.t {
            return Err(Error::MergeMismatch);
        }
        self.counter.merge_from(&other.counter)
    }

    fn meter(&self) -> BitMeter {
        self.counter.bit_meter()
    }
}
