//! Sparsify case: hashed vertex groups wired by a fixed regular graph, with
//! a neighbourhood-size tester and an SNR sketch per group. Recovery rebuilds
//! the edges that are the only link between two clean, non-expanding groups
//! and returns a maximum matching of them.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::KWiseHash;
use crate::error::Error;
use crate::matching::{max_matching, Graph, Matching};
use crate::neighborhood::{tester_samplers, NETester, TesterAnswer, VertexSet};
use crate::snr::{SnrMatrix, SnrSketch};
use crate::stream::{BitMeter, LinearSketch, StreamUpdate};
use crate::derive_seed;

const TAG_GROUP: u64 = 0x90;
const TAG_TESTER: u64 = 0x91;
const TAG_SNR: u64 = 0x92;
const TAG_COPY: u64 = 0x93;

/// Circulant d-regular graph on [k]: i ~ i±1..i±⌊d/2⌋, plus i + k/2 when d is odd.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularGraph {
    k: u64,
    d: u64,
}

impl RegularGraph {
    pub fn new(k: u64, d: u64) -> Result<Self, Error> {
        if d >= k {
            return Err(Error::InvalidParameter(format!("degree {d} must be below node count {k}")));
        }
        if d % 2 == 1 && k % 2 == 1 {
            return Err(Error::InvalidParameter(format!("odd degree {d} needs an even node count (k={k})")));
        }
        Ok(RegularGraph { k, d })
    }

    pub fn nodes(&self) -> u64 {
        self.k
    }

    pub fn degree(&self) -> u64 {
        self.d
    }

    #[inline]
    pub fn adjacent(&self, i: u64, j: u64) -> bool {
        let diff = (j + self.k - i) % self.k;
        let half = self.d / 2;
        (diff >= 1 && diff <= half) || (diff != 0 && diff >= self.k - half) || (self.d % 2 == 1 && 2 * diff == self.k)
    }

    pub fn neighbors(&self, i: u64) -> Vec<u64> {
        let mut out: Vec<u64> = (1..=self.d / 2).flat_map(|o| [(i + o) % self.k, (i + self.k - o) % self.k]).collect();
        if self.d % 2 == 1 {
            out.push((i + self.k / 2) % self.k);
        }
        out.sort_unstable();
        out
    }
}

/// Every size parameter of a sparsify sketch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparsifyParams {
    pub n: u32,
    pub opt: u64,
    pub alpha: f64,
    pub delta: f64,
    pub groups: u64,
    pub degree: u64,
    pub a: usize,
    pub b_tilde: usize,
    pub c: u64,
    pub tester_samplers: usize,
    pub hash_independence: usize,
}

impl SparsifyParams {
    /// k = ⌈10·opt/α⌉ groups, degree ⌈k/α⌉, a = ⌈2opt/α²⌉, b̃ = ⌈n^{δ/4}⌉,
    /// c = ⌈30/δ⌉. Does not check the promise inequalities.
    pub fn formulas(n: u32, opt: u64, alpha: f64, delta: f64) -> Result<Self, Error> {
        if n < 4 || opt == 0 || !(alpha > 1.0) || !(delta > 0.0 && delta <= 0.5) {
            return Err(Error::InvalidParameter(format!(
                "sparsify needs n >= 4, opt >= 1, α > 1, 0 < δ <= 1/2 (n={n}, opt={opt}, α={alpha}, δ={delta})"
            )));
        }
        let mut groups = ((10.0 * opt as f64 / alpha).ceil() as u64).max(2);
        let degree = |k: u64| ((k as f64 / alpha).ceil() as u64).min(k - 1);
        if degree(groups) % 2 == 1 && groups % 2 == 1 {
            groups += 1;
        }
        let a = (2.0 * opt as f64 / (alpha * alpha)).ceil() as usize;
        let b_tilde = (n as f64).powf(delta / 4.0).ceil() as usize;
        let log_n = (n as f64).log2().ceil() as usize;
        Ok(SparsifyParams {
            n,
            opt,
            alpha,
            delta,
            groups,
            degree: degree(groups),
            a,
            b_tilde,
            c: (30.0 / delta).ceil() as u64,
            tester_samplers: tester_samplers(n, a, b_tilde),
            hash_independence: (log_n * log_n).max(2),
        })
    }

    /// Formulas plus the promise checks a ≥ 16·b̃ and a ≥ 100·(2b̃).
    pub fn checked(n: u32, opt: u64, alpha: f64, delta: f64) -> Result<Self, Error> {
        let p = Self::formulas(n, opt, alpha, delta)?;
        p.check_promises()?;
        Ok(p)
    }

    pub fn check_promises(&self) -> Result<(), Error> {
        if self.a < 16 * self.b_tilde || self.a < 200 * self.b_tilde {
            return Err(Error::PromiseRegimeUnreachable(format!(
                "a = {} but the tester and SNR need a >= 16·b̃ and a >= 200·b̃ with b̃ = {}",
                self.a, self.b_tilde
            )));
        }
        Ok(())
    }

    /// Bound on N(V_i) − T_i handed to each SNR sketch.
    pub fn snr_b(&self) -> usize {
        2 * self.b_tilde
    }

    /// Bits of the full sketch from the parameters alone.
    pub fn nominal_meter(&self) -> Result<BitMeter, Error> {
        let k = self.groups;
        let (snr_sketch, snr_random) = SnrMatrix::nominal_bits(self.n, self.a, self.snr_b(), self.c)?;
        let tester = NETester::nominal_meter(self.n, self.a, self.tester_samplers)?;
        let hashes = BitMeter::new(0, k * KWiseHash::nominal_bits(self.hash_independence));
        Ok(tester.times(k) + BitMeter::new(k * snr_sketch, snr_random) + hashes)
    }
}

#[derive(Clone, Debug, PartialEq)]
struct GroupSketch {
    snr: SnrSketch,
    tester: NETester,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparsifyOutcome {
    pub matching: Matching,
    pub removed_by_matching: usize,
    pub removed_expanding: usize,
    pub recovery_failed: usize,
    pub survivors: usize,
    /// Edges of the recovered graph.
    pub recovered_edges: Vec<(u32, u32)>,
}

#[derive(Clone, Debug)]
pub struct SparsifySketch {
    params: SparsifyParams,
    seed: u64,
    graph: RegularGraph,
    members: Vec<Arc<VertexSet>>,
    groups_of: Vec<Vec<u32>>,
    sketches: Vec<Option<GroupSketch>>,
}

impl PartialEq for SparsifySketch {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params && self.seed == other.seed && self.sketches == other.sketches
    }
}

impl SparsifySketch {
    /// Builds from formula parameters, rejecting scales where the promises fail.
    pub fn build(n: u32, opt: u64, alpha: f64, delta: f64, seed: u64) -> Result<Self, Error> {
        Self::with_params(SparsifyParams::checked(n, opt, alpha, delta)?, seed)
    }

    /// Builds from explicit parameters; only structural validity is checked.
    pub fn with_params(params: SparsifyParams, seed: u64) -> Result<Self, Error> {
        let graph = RegularGraph::new(params.groups, params.degree)?;
        let n = params.n;
        let matrix = SnrMatrix::new(n, params.a, params.snr_b(), params.c, derive_seed(seed, TAG_SNR, 0))?;
        let mut members = Vec::with_capacity(params.groups as usize);
        let mut groups_of = vec![Vec::new(); n as usize];
        let mut sketches = Vec::with_capacity(params.groups as usize);
        for i in 0..params.groups {
            let h = KWiseHash::new(params.hash_independence, n as u64, params.groups, derive_seed(seed, TAG_GROUP, i))?;
            let set = Arc::new(VertexSet::new(n, (0..n).filter(|&v| h.eval_unchecked(v as u64) == 0)));
            for &v in set.members() {
                groups_of[v as usize].push(i as u32);
            }
            let sketch = if set.is_empty() {
                None
            } else {
                let tester = NETester::with_samplers(
                    set.clone(),
                    params.a,
                    params.b_tilde,
                    params.tester_samplers,
                    derive_seed(seed, TAG_TESTER, i),
                )?;
                Some(GroupSketch { snr: SnrSketch::new(matrix.clone(), set.clone())?, tester })
            };
            sketches.push(sketch);
            members.push(set);
        }
        Ok(SparsifySketch { params, seed, graph, members, groups_of, sketches })
    }

    pub fn params(&self) -> &SparsifyParams {
        &self.params
    }

    pub fn regular_graph(&self) -> &RegularGraph {
        &self.graph
    }

    pub fn group(&self, i: usize) -> &VertexSet {
        &self.members[i]
    }

    /// Groups containing `v`.
    pub fn groups_of(&self, v: u32) -> &[u32] {
        &self.groups_of[v as usize]
    }

    /// Groups whose G(V_i) contains edge (u, v), with u the endpoint in V_i.
    pub fn routes(&self, u: u32, v: u32) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for (inside, outside) in [(u, v), (v, u)] {
            for &i in &self.groups_of[inside as usize] {
                if self.members[i as usize].contains(outside) {
                    continue;
                }
                if self.groups_of[outside as usize].iter().any(|&j| self.graph.adjacent(i as u64, j as u64)) {
                    out.push((i, inside));
                }
            }
        }
        out
    }

    /// Runs the M_easy test, the expansion test and SNR per group, then
    /// matches the edges that are the unique link between two survivors.
    pub fn recover(&self, m_easy: &Matching) -> SparsifyOutcome {
        let n = self.params.n as usize;
        let mut matched = vec![false; n];
        for v in m_easy.vertices() {
            matched[v as usize] = true;
        }
        let mut out = SparsifyOutcome::default();
        let mut recovered: Vec<Option<BTreeSet<u32>>> = vec![None; self.members.len()];
        for (i, set) in self.members.iter().enumerate() {
            if set.members().iter().any(|&v| matched[v as usize]) {
                out.removed_by_matching += 1;
                continue;
            }
            let Some(g) = &self.sketches[i] else {
                out.survivors += 1;
                recovered[i] = Some(BTreeSet::new());
                continue;
            };
            let t: Vec<u32> = self
                .graph
                .neighbors(i as u64)
                .into_iter()
                .flat_map(|j| self.members[j as usize].members().iter().copied())
                .filter(|&v| matched[v as usize] && !set.contains(v))
                .collect::<BTreeSet<u32>>()
                .into_iter()
                .collect();
            if g.tester.test(&t) == TesterAnswer::No {
                out.removed_expanding += 1;
                continue;
            }
            match g.snr.recover(&t) {
                Ok(nr) => {
                    out.survivors += 1;
                    recovered[i] = Some(nr.into_iter().collect());
                }
                Err(_) => out.recovery_failed += 1,
            }
        }

        let mut edges = Vec::new();
        for i in 0..self.members.len() {
            let Some(nr_i) = &recovered[i] else { continue };
            for j in self.graph.neighbors(i as u64) {
                let j = j as usize;
                if j <= i {
                    continue;
                }
                let Some(nr_j) = &recovered[j] else { continue };
                // A neighbour of v lying in both groups is invisible to both
                // recoveries, so overlapping pairs can pair up non-adjacent
                // vertices.
                if self.members[i].members().iter().any(|&v| self.members[j].contains(v)) {
                    continue;
                }
                let into_j: Vec<u32> = nr_i.iter().copied().filter(|&v| self.members[j].contains(v)).collect();
                let into_i: Vec<u32> = nr_j.iter().copied().filter(|&v| self.members[i].contains(v)).collect();
                if let ([v], [u]) = (into_j.as_slice(), into_i.as_slice()) {
                    if u != v {
                        edges.push((*u.min(v), *u.max(v)));
                    }
                }
            }
        }
        edges.sort_unstable();
        edges.dedup();
        out.matching = max_matching(&Graph::from_edges(n, edges.iter().copied()));
        out.recovered_edges = edges;
        out
    }
}

impl LinearSketch for SparsifySketch {
    fn update(&mut self, up: StreamUpdate) {
        for (i, inside) in self.routes(up.u, up.v) {
            let Some(g) = &mut self.sketches[i as usize] else { continue };
            let outside = if inside == up.u { up.v } else { up.u };
            g.snr.update_vertex(outside, up.delta as i64);
            g.tester.update(up);
        }
    }

    fn merge(&mut self, other: &Self) -> Result<(), Error> {
        if self.params != other.params || self.seed != other.seed {
            return Err(Error::MergeMismatch);
        }
        for (a, b) in self.sketches.iter_mut().zip(&other.sketches) {
            if let (Some(a), Some(b)) = (a, b) {
                a.snr.merge(&b.snr)?;
                a.tester.merge(&b.tester)?;
            }
        }
        Ok(())
    }

    fn meter(&self) -> BitMeter {
        self.params.nominal_meter().expect("built")
    }
}

/// Independent copies of a sparsify sketch; recovery keeps the largest matching.
#[derive(Clone, Debug, PartialEq)]
pub struct AmplifiedSparsify {
    copies: Vec<SparsifySketch>,
}

impl AmplifiedSparsify {
    /// ⌈60/δ⌉ copies.
    pub fn copies_for(delta: f64) -> usize {
        (60.0 / delta).ceil() as usize
    }

    pub fn new(params: SparsifyParams, copies: usize, seed: u64) -> Result<Self, Error> {
        let copies = (0..copies)
            .map(|c| SparsifySketch::with_params(params, derive_seed(seed, TAG_COPY, c as u64)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(AmplifiedSparsify { copies })
    }

    pub fn recover(&self, m_easy: &Matching) -> Matching {
        self.copies.iter().map(|c| c.recover(m_easy).matching).max_by_key(|m| m.len()).unwrap_or_default()
    }
}

impl LinearSketch for AmplifiedSparsify {
    fn update(&mut self, up: StreamUpdate) {
        for c in &mut self.copies {
            c.update(up);
        }
    }

    fn merge(&mut self, other: &Self) -> Result<(), Error> {
        if self.copies.len() != other.copies.len() {
            return Err(Error::MergeMismatch);
        }
        for (a, b) in self.copies.iter_mut().zip(&other.copies) {
            a.merge(b)?;
        }
        Ok(())
    }

    fn meter(&self) -> BitMeter {
        self.copies.iter().map(|c| c.meter()).sum()
    }
}
