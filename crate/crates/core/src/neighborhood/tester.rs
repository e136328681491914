//! Distinguishing |N(S) − T| ≤ b̃ from |N(S) − T| ≥ 2b̃ for a T given only at
//! recovery time.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::VertexSet;
use crate::error::Error;
use crate::recovery::{FingerprintKey, L0Outcome, L0Params, L0Sampler};
use crate::stream::{BitMeter, LinearSketch, StreamUpdate};
use crate::derive_seed;

const TAG_SAMPLER: u64 = 0x40;
const TAG_KEY: u64 = 0x41;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TesterAnswer {
    Yes,
    No,
}

/// ⌈(100/99)·150·ln n·(a + b̃)/b̃⌉ samplers.
pub fn tester_samplers(n: u32, a: usize, b_tilde: usize) -> usize {
    let ln_n = (n as f64).ln();
    (100.0 / 99.0 * 150.0 * ln_n * (a + b_tilde) as f64 / b_tilde as f64).ceil() as usize
}

/// ⌈200·ln n⌉: the number of outside-T samples above which the answer is No.
pub fn tester_cutoff(n: u32) -> usize {
    (200.0 * (n as f64).ln()).ceil() as usize
}

/// NE-Tester for a fixed set S with parameters (a, b̃).
///
/// Samplers run over the vertex vector x(G, S) extended with `a` dummy
/// coordinates, so T can always be padded to exactly `a` elements.
#[derive(Clone, Debug)]
pub struct NETester {
    set: Arc<VertexSet>,
    a: usize,
    b_tilde: usize,
    seed: u64,
    params: L0Params,
    key: Arc<FingerprintKey>,
    samplers: Vec<L0Sampler>,
}

impl NETester {
    /// Tester with the sampler count from [`tester_samplers`].
    pub fn new(set: Arc<VertexSet>, a: usize, b_tilde: usize, seed: u64) -> Result<Self, Error> {
        let k = tester_samplers(set.universe(), a, b_tilde);
        Self::with_samplers(set, a, b_tilde, k, seed)
    }

    /// Tester with an explicit sampler count (desk-scale experiments).
    pub fn with_samplers(set: Arc<VertexSet>, a: usize, b_tilde: usize, samplers: usize, seed: u64) -> Result<Self, Error> {
        if b_tilde == 0 || a < 16 * b_tilde {
            return Err(Error::InvalidParameter(format!("tester needs a >= 16·b̃ >= 16 (a={a}, b̃={b_tilde})")));
        }
        if set.is_empty() || samplers == 0 {
            return Err(Error::InvalidParameter("tester needs a nonempty S and at least one sampler".into()));
        }
        let n = set.universe();
        let params = Self::sampler_params(n, a)?;
        let key = Arc::new(FingerprintKey::new(params.fingerprints, derive_seed(seed, TAG_KEY, 0)));
        let samplers = (0..samplers)
            .map(|i| L0Sampler::with_shared_key(params, derive_seed(seed, TAG_SAMPLER, i as u64), key.clone()))
            .collect();
        Ok(NETester { set, a, b_tilde, seed, params, key, samplers })
    }

    fn sampler_params(n: u32, a: usize) -> Result<L0Params, Error> {
        L0Params::new(n as u64 + a as u64, 0.01, (n as f64).powi(-10))
    }

    /// Meter of a tester with `samplers` samplers, without building it.
    pub fn nominal_meter(n: u32, a: usize, samplers: usize) -> Result<BitMeter, Error> {
        let p = Self::sampler_params(n, a)?;
        Ok(BitMeter::new(samplers as u64 * p.sketch_bits(), samplers as u64 * p.hash_bits() + p.key_bits()))
    }

    pub fn sampler_count(&self) -> usize {
        self.samplers.len()
    }

    /// T padded with dummy coordinates n, n+1, ... up to size a; members of S dropped.
    fn padded(&self, t: &[u32]) -> BTreeSet<u64> {
        let n = self.set.universe() as u64;
        let mut out: BTreeSet<u64> = t.iter().filter(|&&w| !self.set.contains(w)).map(|&w| w as u64).collect();
        let mut dummy = n;
        while out.len() < self.a && dummy < n + self.a as u64 {
            out.insert(dummy);
            dummy += 1;
        }
        out
    }

    /// Number of samplers returning a vertex outside T after injecting an
    /// artificial edge (w, min S) for every w in the padded T.
    pub fn outside_count(&self, t: &[u32]) -> usize {
        let padded = self.padded(t);
        let injections: Vec<_> = padded.iter().map(|&w| self.key.prepare(&self.params, w, 1)).collect();
        self.samplers
            .iter()
            .filter(|s| matches!(s.query_with(&injections), L0Outcome::Sample { index, .. } if !padded.contains(&index)))
            .count()
    }

    pub fn test(&self, t: &[u32]) -> TesterAnswer {
        if self.outside_count(t) <= tester_cutoff(self.set.universe()) {
            TesterAnswer::Yes
        } else {
            TesterAnswer::No
        }
    }
}

impl PartialEq for NETester {
    fn eq(&self, other: &Self) -> bool {
        self.set == other.set && self.a == other.a && self.b_tilde == other.b_tilde && self.seed == other.seed && self.samplers == other.samplers
    }
}

impl LinearSketch for NETester {
    fn update(&mut self, up: StreamUpdate) {
        let Some((_, w)) = self.set.crossing(&up) else { return };
        let p = self.key.prepare(&self.params, w as u64, up.delta as i64);
        for s in &mut self.samplers {
            s.apply(&p);
        }
    }

    fn feed<I: IntoIterator<Item = StreamUpdate>>(&mut self, updates: I) {
        let prepared: Vec<_> = updates
            .into_iter()
            .filter_map(|up| self.set.crossing(&up).map(|(_, w)| self.key.prepare(&self.params, w as u64, up.delta as i64)))
            .collect();
        for s in &mut self.samplers {
            s.apply_all(&prepared);
        }
    }

    fn merge(&mut self, other: &Self) -> Result<(), Error> {
        if self.set != other.set || self.a != other.a || self.seed != other.seed || self.samplers.len() != other.samplers.len() {
            return Err(Error::MergeMismatch);
        }
        for (a, b) in self.samplers.iter_mut().zip(&other.samplers) {
            a.merge_from(b)?;
        }
        Ok(())
    }

    fn meter(&self) -> BitMeter {
        Self::nominal_meter(self.set.universe(), self.a, self.samplers.len()).expect("built")
    }
}
