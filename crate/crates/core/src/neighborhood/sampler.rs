//! Sampling an edge from S to a uniformly random vertex of N(S).

use std::sync::Arc;

use super::counter::{CounterAnswer, SplitCounter};
use super::VertexSet;
use crate::algebra::KWiseHash;
use crate::error::Error;
use crate::recovery::{FingerprintKey, L0Outcome, L0Params, L0Sampler, LEVEL_INDEPENDENCE};
use crate::stream::{edge_from_index, edge_index, pair_count, BitMeter, LinearSketch, StreamUpdate};
use crate::derive_seed;

pub const SAMPLER_ITERATIONS: usize = 50;
const TAG_LEVEL_SET: u64 = 0x30;
const TAG_CELL_L0: u64 = 0x31;
const TAG_CELL_COUNTER: u64 = 0x32;
const TAG_KEY: u64 = 0x33;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NeSample {
    /// An edge with `inside ∈ S` and `outside ∈ N(S)`.
    Edge { inside: u32, outside: u32 },
    Fail,
}

#[derive(Clone, Debug, PartialEq)]
struct Cell {
    l0: L0Sampler,
    counter: SplitCounter,
}

/// Shape parameters shared by every NE-Sampler on n vertices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplerShape {
    pub n: u32,
    pub levels: usize,
    pub l0: L0Params,
    pub counter_delta: f64,
}

impl SamplerShape {
    pub fn new(n: u32) -> Result<Self, Error> {
        if n < 2 {
            return Err(Error::InvalidParameter("NE-Sampler needs n >= 2".into()));
        }
        let delta_e = (n as f64).powi(-10);
        Ok(SamplerShape {
            n,
            levels: (2.0 * (n as f64).log2()).ceil() as usize + 1,
            l0: L0Params::new(pair_count(n), 0.01, delta_e)?,
            counter_delta: delta_e,
        })
    }

    fn cells(&self) -> usize {
        SAMPLER_ITERATIONS * self.levels
    }

    /// Nominal meter: every cell charged whether or not it was ever touched.
    pub fn nominal_meter(&self) -> BitMeter {
        let cells = self.cells() as u64;
        let counter = SplitCounter::nominal_meter(self.n, self.counter_delta);
        BitMeter::new(
            cells * (self.l0.sketch_bits() + counter.sketch_bits),
            cells * (self.l0.hash_bits() + counter.randomness_bits)
                + SAMPLER_ITERATIONS as u64 * KWiseHash::nominal_bits(LEVEL_INDEPENDENCE)
                + self.l0.key_bits(),
        )
    }
}

/// NE-Sampler for a fixed set S.
#[derive(Clone, Debug)]
pub struct NESampler {
    shape: SamplerShape,
    set: Arc<VertexSet>,
    seed: u64,
    level_sets: Vec<KWiseHash>,
    key: Arc<FingerprintKey>,
    cells: Vec<Option<Box<Cell>>>,
}

impl NESampler {
    pub fn new(set: Arc<VertexSet>, seed: u64) -> Result<Self, Error> {
        let shape = SamplerShape::new(set.universe())?;
        Ok(Self::with_shape(shape, set, seed))
    }

    pub fn with_shape(shape: SamplerShape, set: Arc<VertexSet>, seed: u64) -> Self {
        assert_eq!(shape.n, set.universe());
        let range = 1 << (shape.levels - 1);
        let level_sets = (0..SAMPLER_ITERATIONS)
            .map(|it| KWiseHash::new(LEVEL_INDEPENDENCE, shape.n as u64, range, derive_seed(seed, TAG_LEVEL_SET, it as u64)).expect("valid"))
            .collect();
        let key = Arc::new(FingerprintKey::new(shape.l0.fingerprints, derive_seed(seed, TAG_KEY, 0)));
        NESampler { shape, set, seed, level_sets, key, cells: vec![None; shape.cells()] }
    }

    pub fn set(&self) -> &VertexSet {
        &self.set
    }

    fn new_cell(&self, c: usize) -> Cell {
        let l0 = L0Sampler::with_shared_key(self.shape.l0, derive_seed(self.seed, TAG_CELL_L0, c as u64), self.key.clone());
        let counter = SplitCounter::new(self.shape.n, self.shape.counter_delta, derive_seed(self.seed, TAG_CELL_COUNTER, c as u64))
            .expect("valid");
        Cell { l0, counter }
    }

    /// Scans iterations then levels, returning the first level isolating one neighbour.
    pub fn query(&self) -> NeSample {
        for cell in self.cells.iter().flatten() {
            if cell.counter.query() != CounterAnswer::One {
                continue;
            }
            if let L0Outcome::Sample { index, .. } = cell.l0.query() {
                let (u, v) = edge_from_index(index, self.shape.n).expect("index in range");
                let (inside, outside) = if self.set.contains(u) { (u, v) } else { (v, u) };
                return NeSample::Edge { inside, outside };
            }
        }
        NeSample::Fail
    }
}

impl PartialEq for NESampler {
    fn eq(&self, other: &Self) -> bool {
        if self.shape != other.shape || self.seed != other.seed || self.set != other.set {
            return false;
        }
        self.cells.iter().zip(&other.cells).all(|pair| match pair {
            (None, None) => true,
            (Some(a), None) | (None, Some(a)) => a.l0.is_zero() && a.counter.is_zero(),
            (Some(a), Some(b)) => a == b,
        })
    }
}

/// Deepest level containing a vertex whose iteration hash is `hv`: levels are
/// nested, level i holding the vertices whose hash has at least i trailing
/// zeros.
fn level_of(hv: u64, top: usize) -> usize {
    if hv == 0 {
        top
    } else {
        (hv.trailing_zeros() as usize).min(top)
    }
}

impl LinearSketch for NESampler {
    fn update(&mut self, up: StreamUpdate) {
        let Some((_, w)) = self.set.crossing(&up) else { return };
        let j = edge_index(up.u, up.v, self.shape.n).expect("valid edge");
        let prepared = self.key.prepare(&self.shape.l0, j, up.delta as i64);
        let levels = self.shape.levels;
        for it in 0..SAMPLER_ITERATIONS {
            let depth = level_of(self.level_sets[it].eval_unchecked(w as u64), levels - 1);
            for c in it * levels..=it * levels + depth {
                if self.cells[c].is_none() {
                    self.cells[c] = Some(Box::new(self.new_cell(c)));
                }
                let cell = self.cells[c].as_mut().expect("allocated");
                cell.l0.apply(&prepared);
                cell.counter.update_vertex(w, up.delta as i64);
            }
        }
    }

    /// Batched form of `update`: each touched cell takes all its updates at once.
    fn feed<I: IntoIterator<Item = StreamUpdate>>(&mut self, updates: I) {
        let n = self.shape.n;
        let batch: Vec<_> = updates
            .into_iter()
            .filter_map(|up| {
                let (_, w) = self.set.crossing(&up)?;
                let j = edge_index(up.u, up.v, n).expect("valid edge");
                Some((w, up.delta as i64, self.key.prepare(&self.shape.l0, j, up.delta as i64)))
            })
            .collect();
        let levels = self.shape.levels;
        let mut prepared = Vec::with_capacity(batch.len());
        let mut vertices = Vec::with_capacity(batch.len());
        for it in 0..SAMPLER_ITERATIONS {
            let depths: Vec<usize> = batch
                .iter()
                .map(|&(w, _, _)| level_of(self.level_sets[it].eval_unchecked(w as u64), levels - 1))
                .collect();
            for level in 0..levels {
                prepared.clear();
                vertices.clear();
                for (&(w, d, p), &depth) in batch.iter().zip(&depths) {
                    if depth >= level {
                        prepared.push(p);
                        vertices.push((w, d));
                    }
                }
                if prepared.is_empty() {
                    break;
                }
                let c = it * levels + level;
                if self.cells[c].is_none() {
                    self.cells[c] = Some(Box::new(self.new_cell(c)));
                }
                let cell = self.cells[c].as_mut().expect("allocated");
                cell.l0.apply_all(&prepared);
                for &(w, d) in &vertices {
                    cell.counter.update_vertex(w, d);
                }
            }
        }
    }

    fn merge(&mut self, other: &Self) -> Result<(), Error> {
        if self.shape != other.shape || self.seed != other.seed || self.set != other.set {
            return Err(Error::MergeMismatch);
        }
        for (c, theirs) in other.cells.iter().enumerate() {
            let Some(theirs) = theirs else { continue };
            match &mut self.cells[c] {
                Some(mine) => {
                    mine.l0.merge_from(&theirs.l0)?;
                    mine.counter.merge_from(&theirs.counter)?;
                }
                slot @ None => *slot = Some(theirs.clone()),
            }
        }
        Ok(())
    }

    fn meter(&self) -> BitMeter {
        self.shape.nominal_meter()
    }
}
