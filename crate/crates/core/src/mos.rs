//! Match-or-sparsify: 2s NE-Samplers over randomly hashed vertex groups and
//! a greedy pass over their samples.
//!
//! Either the greedy matching M_easy is already large, or the subgraph
//! induced on the vertices M_easy leaves unmatched is sparse and still has a
//! large matching.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::KWiseHash;
use crate::error::Error;
use crate::matching::{max_matching, Graph, Matching};
use crate::neighborhood::{NeSample, NESampler, SamplerShape, VertexSet};
use crate::stream::{BitMeter, LinearSketch, StreamUpdate};
use crate::derive_seed;

const TAG_GROUP: u64 = 0x80;
const TAG_SAMPLER: u64 = 0x81;

/// Multipliers on the three thresholds of the match/sparsify disjunction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MosKnobs {
    /// On opt/(8α), the match-case size.
    pub match_size: f64,
    /// On 20·opt·log₂⁴n, the sparsify-case edge count.
    pub sparse_edges: f64,
    /// On 3·opt/4, the sparsify-case matching size.
    pub sparse_matching: f64,
}

impl Default for MosKnobs {
    fn default() -> Self {
        MosKnobs { match_size: 1.0, sparse_edges: 1.0, sparse_matching: 1.0 }
    }
}

impl MosKnobs {
    pub fn match_threshold(&self, opt: u64, alpha: f64) -> f64 {
        self.match_size * opt as f64 / (8.0 * alpha)
    }

    pub fn sparse_edge_threshold(&self, opt: u64, n: u32) -> f64 {
        self.sparse_edges * 20.0 * opt as f64 * (n as f64).log2().powi(4)
    }

    pub fn sparse_matching_threshold(&self, opt: u64) -> f64 {
        self.sparse_matching * 3.0 * opt as f64 / 4.0
    }
}

/// Group count k = ⌈opt/α⌉ and step count s = ⌈opt²/(α·log₂ n)³⌉.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MosParams {
    pub n: u32,
    pub opt: u64,
    pub alpha: f64,
    pub groups: u64,
    pub steps: usize,
}

impl MosParams {
    pub fn new(n: u32, opt: u64, alpha: f64) -> Result<Self, Error> {
        if n < 2 || opt == 0 || !(alpha > 1.0) {
            return Err(Error::InvalidParameter(format!("MOS needs n >= 2, opt >= 1, α > 1 (n={n}, opt={opt}, α={alpha})")));
        }
        let groups = (opt as f64 / alpha).ceil() as u64;
        let steps = ((opt as f64).powi(2) / (alpha * (n as f64).log2()).powi(3)).ceil() as usize;
        if groups == 0 || steps == 0 {
            return Err(Error::InvalidParameter("MOS rounds to zero groups or steps".into()));
        }
        Ok(MosParams { n, opt, alpha, groups, steps })
    }

    /// Whether opt ≥ α²·n^δ.
    pub fn in_regime(&self, delta: f64) -> bool {
        self.opt as f64 >= self.alpha * self.alpha * (self.n as f64).powf(delta)
    }

    pub fn sampler_count(&self) -> usize {
        2 * self.steps
    }

    pub fn nominal_meter(&self) -> Result<BitMeter, Error> {
        let shape = SamplerShape::new(self.n)?;
        let k = self.sampler_count() as u64;
        Ok(shape.nominal_meter().times(k) + BitMeter::new(0, k * KWiseHash::nominal_bits(2)))
    }
}

/// One greedy-matching edge with the step that produced it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepEdge {
    pub step: usize,
    pub edge: (u32, u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MosOutcome {
    pub matching: Matching,
    pub provenance: Vec<StepEdge>,
    /// Steps whose sampler failed.
    pub failed_steps: usize,
}

#[derive(Clone, Debug)]
pub struct MosSketch {
    params: MosParams,
    seed: u64,
    groups: Vec<Arc<VertexSet>>,
    samplers: Vec<NESampler>,
}

impl PartialEq for MosSketch {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params && self.seed == other.seed && self.samplers == other.samplers
    }
}

impl MosSketch {
    pub fn build(n: u32, opt: u64, alpha: f64, seed: u64) -> Result<Self, Error> {
        let params = MosParams::new(n, opt, alpha)?;
        let shape = SamplerShape::new(n)?;
        let mut groups = Vec::with_capacity(params.sampler_count());
        let mut samplers = Vec::with_capacity(params.sampler_count());
        for i in 0..params.sampler_count() {
            let h = KWiseHash::new(2, n as u64, params.groups, derive_seed(seed, TAG_GROUP, i as u64))?;
            let set = Arc::new(VertexSet::new(n, (0..n).filter(|&v| h.eval_unchecked(v as u64) == 0)));
            samplers.push(NESampler::with_shape(shape, set.clone(), derive_seed(seed, TAG_SAMPLER, i as u64)));
            groups.push(set);
        }
        Ok(MosSketch { params, seed, groups, samplers })
    }

    pub fn params(&self) -> &MosParams {
        &self.params
    }

    /// V_i for step i.
    pub fn group(&self, step: usize) -> &VertexSet {
        &self.groups[step]
    }

    /// Greedy over the steps in order; failed steps are skipped.
    pub fn recover(&self) -> MosOutcome {
        let mut used = vec![false; self.params.n as usize];
        let mut provenance = Vec::new();
        let mut failed_steps = 0;
        for (step, s) in self.samplers.iter().enumerate() {
            match s.query() {
                NeSample::Fail => failed_steps += 1,
                NeSample::Edge { inside, outside } => {
                    let (u, v) = (inside as usize, outside as usize);
                    if !used[u] && !used[v] {
                        used[u] = true;
                        used[v] = true;
                        provenance.push(StepEdge { step, edge: (inside.min(outside), inside.max(outside)) });
                    }
                }
            }
        }
        let matching = Matching::from_edges(provenance.iter().map(|e| e.edge)).expect("greedy keeps edges disjoint");
        MosOutcome { matching, provenance, failed_steps }
    }
}

impl LinearSketch for MosSketch {
    fn update(&mut self, up: StreamUpdate) {
        for s in &mut self.samplers {
            s.update(up);
        }
    }

    fn merge(&mut self, other: &Self) -> Result<(), Error> {
        if self.params != other.params || self.seed != other.seed {
            return Err(Error::MergeMismatch);
        }
        for (a, b) in self.samplers.iter_mut().zip(&other.samplers) {
            a.merge(b)?;
        }
        Ok(())
    }

    fn meter(&self) -> BitMeter {
        self.params.nominal_meter().expect("built")
    }
}

/// Which side of the match/sparsify disjunction an M_easy satisfies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disjunction {
    pub match_case: bool,
    /// Edges of the subgraph induced on vertices M_easy leaves unmatched.
    pub residual_edges: usize,
    /// Maximum matching of that subgraph.
    pub residual_matching: usize,
    pub sparsify_case: bool,
}

impl Disjunction {
    pub fn holds(&self) -> bool {
        self.match_case || self.sparsify_case
    }
}

/// Checks the disjunction exactly against the net graph.
pub fn check_disjunction(g: &Graph, m_easy: &Matching, opt: u64, alpha: f64, knobs: &MosKnobs) -> Disjunction {
    let n = g.vertex_count();
    let match_case = m_easy.len() as f64 >= knobs.match_threshold(opt, alpha);
    let mut keep = vec![true; n];
    for v in m_easy.vertices() {
        keep[v as usize] = false;
    }
    let residual = g.induced(&keep);
    let residual_edges = residual.edge_count();
    let residual_matching = max_matching(&residual).len();
    let sparsify_case = residual_edges as f64 <= knobs.sparse_edge_threshold(opt, n as u32)
        && residual_matching as f64 >= knobs.sparse_matching_threshold(opt);
    Disjunction { match_case, residual_edges, residual_matching, sparsify_case }
}
