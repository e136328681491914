//! Sketches addressed by a vertex set S: neighbourhood counting, sampling and
//! size testing.
//!
//! N(S) is the set of vertices outside S with an edge into S; edges with both
//! endpoints in S are ignored.

mod counter;
mod sampler;
mod tester;

pub use counter::{CounterAnswer, NECounter, SplitCounter};
pub use sampler::{NeSample, NESampler, SamplerShape, SAMPLER_ITERATIONS};
pub use tester::{tester_cutoff, tester_samplers, NETester, TesterAnswer};

use crate::stream::StreamUpdate;

/// A fixed vertex subset with O(1) membership.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexSet {
    member: Vec<bool>,
    list: Vec<u32>,
}

impl VertexSet {
    pub fn new(n: u32, vertices: impl IntoIterator<Item = u32>) -> Self {
        let mut member = vec![false; n as usize];
        for v in vertices {
            member[v as usize] = true;
        }
        let list = (0..n).filter(|&v| member[v as usize]).collect();
        VertexSet { member, list }
    }

    pub fn universe(&self) -> u32 {
        self.member.len() as u32
    }

    #[inline]
    pub fn contains(&self, v: u32) -> bool {
        self.member.get(v as usize).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    /// Members in increasing order.
    pub fn members(&self) -> &[u32] {
        &self.list
    }

    /// Splits an update into (endpoint in S, endpoint outside S), if it crosses S.
    #[inline]
    pub fn crossing(&self, up: &StreamUpdate) -> Option<(u32, u32)> {
        match (self.contains(up.u), self.contains(up.v)) {
            (true, false) => Some((up.u, up.v)),
            (false, true) => Some((up.v, up.u)),
            _ => None,
        }
    }
}
