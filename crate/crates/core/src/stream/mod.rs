//! Dynamic graph streams: signed edge updates, the linear-sketch contract,
//! bit accounting and the plain-text stream format.

mod format;
mod meter;

pub use format::{write_stream, Stream, StreamReader};
pub use meter::BitMeter;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// A signed edge update with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StreamUpdate {
    pub u: u32,
    pub v: u32,
    pub delta: i8,
}

impl StreamUpdate {
    /// Validated, canonicalized update for a graph on `n` vertices.
    pub fn new(u: u32, v: u32, delta: i8, n: u32) -> Result<Self, Error> {
        if u == v || u >= n || v >= n || (delta != 1 && delta != -1) {
            return Err(Error::InvalidEdge { u, v, n });
        }
        Ok(Self::canonical(u, v, delta))
    }

    pub fn insert(u: u32, v: u32) -> Self {
        Self::canonical(u, v, 1)
    }

    pub fn delete(u: u32, v: u32) -> Self {
        Self::canonical(u, v, -1)
    }

    fn canonical(u: u32, v: u32, delta: i8) -> Self {
        debug_assert_ne!(u, v);
        StreamUpdate { u: u.min(v), v: u.max(v), delta }
    }

    pub fn edge(&self) -> (u32, u32) {
        (self.u, self.v)
    }

    /// The same edge with the opposite sign.
    pub fn inverse(&self) -> Self {
        StreamUpdate { delta: -self.delta, ..*self }
    }
}

/// Lexicographic index of the pair {u, v} among all C(n, 2) pairs.
pub fn edge_index(u: u32, v: u32, n: u32) -> Result<u64, Error> {
    if u == v || u >= n || v >= n {
        return Err(Error::InvalidEdge { u, v, n });
    }
    let (u, v) = (u.min(v) as u64, u.max(v) as u64);
    let n = n as u64;
    Ok(u * (2 * n - u - 1) / 2 + (v - u - 1))
}

/// Inverse of [`edge_index`].
pub fn edge_from_index(j: u64, n: u32) -> Result<(u32, u32), Error> {
    let nn = n as u64;
    if nn < 2 || j >= nn * (nn - 1) / 2 {
        return Err(Error::OutOfDomain { x: j, n: nn * nn.saturating_sub(1) / 2 });
    }
    let start = |u: u64| u * (2 * nn - u - 1) / 2;
    // largest u with start(u) <= j
    let (mut lo, mut hi) = (0u64, nn - 1);
    while lo + 1 < hi {
        let mid = (lo + hi) / 2;
        if start(mid) <= j {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let u = if start(hi) <= j { hi } else { lo };
    let v = j - start(u) + u + 1;
    Ok((u as u32, v as u32))
}

/// Number of vertex pairs C(n, 2).
pub fn pair_count(n: u32) -> u64 {
    n as u64 * (n as u64).saturating_sub(1) / 2
}

/// Net multiplicity of every edge touched by `updates`, zeros dropped.
pub fn net_edges<'a>(updates: impl IntoIterator<Item = &'a StreamUpdate>) -> BTreeMap<(u32, u32), i64> {
    let mut net = BTreeMap::new();
    for up in updates {
        *net.entry(up.edge()).or_insert(0i64) += up.delta as i64;
    }
    net.retain(|_, m| *m != 0);
    net
}

/// The update/merge/measure contract shared by every sketch.
pub trait LinearSketch {
    /// Applies one signed edge update.
    fn update(&mut self, up: StreamUpdate);

    /// Adds another sketch built with the same seed and parameters.
    fn merge(&mut self, other: &Self) -> Result<(), Error>;

    /// Exact size under the crate's counting rules.
    fn meter(&self) -> BitMeter;

    fn feed<I: IntoIterator<Item = StreamUpdate>>(&mut self, updates: I)
    where
        Self: Sized,
    {
        for up in updates {
            self.update(up);
        }
    }
}
