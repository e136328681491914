//! L0 sampling by geometric subsampling and fingerprinted one-sparse detectors.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{smallest_prime_gt, KWiseHash, PrimeField};
use crate::error::Error;
use crate::stream::{edge_index, BitMeter, LinearSketch, StreamUpdate};
use crate::{ceil_log2, derive_seed, SEED_BITS};

const MAX_FINGERPRINTS: usize = 8;
const TAG_LEVEL: u64 = 0x10;
const TAG_KEY: u64 = 0x11;

/// Independence of the level hashes. Pairwise hashing isolates each support
/// element with probability within a constant factor of uniform but visibly
/// skews structured supports; this much independence makes the skew
/// negligible.
pub const LEVEL_INDEPENDENCE: usize = 8;

/// Result of querying an L0 sampler.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum L0Outcome {
    Sample { index: u64, value: i64 },
    Empty,
    Fail,
}

/// Shape of an L0 sampler, derived from (m, δ_F, δ_E).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct L0Params {
    pub domain: u64,
    pub repetitions: usize,
    pub levels: usize,
    pub fingerprints: usize,
    /// Field for the count and index-weighted sum; larger than the domain.
    pub count_field: PrimeField,
}

impl L0Params {
    pub fn new(domain: u64, delta_fail: f64, delta_err: f64) -> Result<Self, Error> {
        if domain == 0 || domain >= 1 << 30 {
            return Err(Error::InvalidParameter(format!("L0 domain {domain} must be in [1, 2^30)")));
        }
        if !(delta_fail > 0.0 && delta_fail < 1.0 && delta_err > 0.0 && delta_err < 1.0) {
            return Err(Error::InvalidParameter("L0 error probabilities must lie in (0, 1)".into()));
        }
        let repetitions = ((1.0 / delta_fail).log2().ceil() as usize).max(1);
        let levels = ceil_log2(domain) as usize + 1;
        let checks = (repetitions * levels) as f64;
        let per_fp = 61.0 - (domain as f64).log2();
        let fingerprints = (((1.0 / delta_err).log2() + checks.log2()) / per_fp).ceil().max(1.0) as usize;
        if fingerprints > MAX_FINGERPRINTS {
            return Err(Error::InvalidParameter("δ_E too small for the fingerprint field".into()));
        }
        Ok(L0Params {
            domain,
            repetitions,
            levels,
            fingerprints,
            count_field: PrimeField::new(smallest_prime_gt(domain)).expect("prime"),
        })
    }

    fn stride(&self) -> usize {
        2 + self.fingerprints
    }

    /// Bits of one (count, index sum, fingerprints) detector.
    pub fn detector_bits(&self) -> u64 {
        2 * self.count_field.element_bits() + self.fingerprints as u64 * 61
    }

    pub fn sketch_bits(&self) -> u64 {
        (self.repetitions * self.levels) as u64 * self.detector_bits()
    }

    /// Level hashes only; the fingerprint key is metered separately.
    pub fn hash_bits(&self) -> u64 {
        self.repetitions as u64 * KWiseHash::nominal_bits(LEVEL_INDEPENDENCE)
    }

    pub fn key_bits(&self) -> u64 {
        self.fingerprints as u64 * 61 + SEED_BITS
    }

    /// Full meter of a sampler that owns its fingerprint key.
    pub fn nominal_meter(&self) -> BitMeter {
        BitMeter::new(self.sketch_bits(), self.hash_bits() + self.key_bits())
    }
}

/// Fingerprint evaluation points, possibly shared by many samplers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FingerprintKey {
    points: Vec<u64>,
    seed: u64,
}

/// One update with its fingerprint powers precomputed.
#[derive(Clone, Copy, Debug)]
pub struct PreparedUpdate {
    index: u64,
    count: u64,
    index_sum: u64,
    fp: [u64; MAX_FINGERPRINTS],
}

impl FingerprintKey {
    pub fn new(fingerprints: usize, seed: u64) -> Self {
        let f = PrimeField::mersenne61();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points = (0..fingerprints).map(|_| rng.gen_range(1..f.modulus())).collect();
        FingerprintKey { points, seed }
    }

    /// Sharing-group id used by the bit meter.
    pub fn group(&self) -> u64 {
        derive_seed(self.seed, TAG_KEY, 0)
    }

    pub fn prepare(&self, params: &L0Params, index: u64, delta: i64) -> PreparedUpdate {
        debug_assert!(index < params.domain);
        let f = PrimeField::mersenne61();
        let cf = params.count_field;
        let d = f.from_i64(delta);
        let mut fp = [0u64; MAX_FINGERPRINTS];
        for (slot, &z) in fp.iter_mut().zip(&self.points) {
            *slot = f.mul(d, f.pow(z, index));
        }
        let count = cf.from_i64(delta);
        PreparedUpdate { index, count, index_sum: cf.mul(count, cf.reduce(index)), fp }
    }
}

/// Samples a uniform element of the support of a turnstile vector.
#[derive(Clone, Debug)]
pub struct L0Sampler {
    params: L0Params,
    seed: u64,
    level_hashes: Vec<KWiseHash>,
    key: Arc<FingerprintKey>,
    key_shared: bool,
    /// Per repetition, detectors for levels 0..len/stride, allocated on first touch.
    rows: Vec<Vec<u64>>,
}

impl L0Sampler {
    /// A sampler over `[domain]` with its own fingerprint key.
    pub fn new(domain: u64, delta_fail: f64, delta_err: f64, seed: u64) -> Result<Self, Error> {
        let params = L0Params::new(domain, delta_fail, delta_err)?;
        let key = Arc::new(FingerprintKey::new(params.fingerprints, derive_seed(seed, TAG_KEY, 1)));
        Ok(Self::build(params, seed, key, false))
    }

    /// A sampler whose fingerprint key belongs to a sharing group.
    pub fn with_shared_key(params: L0Params, seed: u64, key: Arc<FingerprintKey>) -> Self {
        assert_eq!(key.points.len(), params.fingerprints);
        Self::build(params, seed, key, true)
    }

    fn build(params: L0Params, seed: u64, key: Arc<FingerprintKey>, key_shared: bool) -> Self {
        let range = 1u64 << (params.levels - 1);
        let level_hashes = (0..params.repetitions)
            .map(|r| KWiseHash::new(LEVEL_INDEPENDENCE, params.domain, range, derive_seed(seed, TAG_LEVEL, r as u64)).expect("valid"))
            .collect();
        L0Sampler { params, seed, level_hashes, key, key_shared, rows: vec![Vec::new(); params.repetitions] }
    }

    pub fn params(&self) -> &L0Params {
        &self.params
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Adds `delta` to coordinate `index`.
    pub fn update_index(&mut self, index: u64, delta: i64) {
        let p = self.key.prepare(&self.params, index, delta);
        self.apply(&p);
    }

    /// Applies an update prepared with this sampler's key.
    pub fn apply(&mut self, p: &PreparedUpdate) {
        self.apply_all(std::slice::from_ref(p));
    }

    /// Applies a batch of prepared updates, one repetition at a time.
    pub fn apply_all(&mut self, ps: &[PreparedUpdate]) {
        for (h, row) in self.level_hashes.iter().zip(self.rows.iter_mut()) {
            for p in ps {
                add_to_row(&self.params, h, row, p);
            }
        }
    }

    /// Queries the sampler as if `extra` had also been applied, leaving it untouched.
    pub fn query_with(&self, extra: &[PreparedUpdate]) -> L0Outcome {
        let mut scratch = Vec::new();
        let mut all_zero = true;
        for (h, row) in self.level_hashes.iter().zip(&self.rows) {
            scratch.clear();
            scratch.extend_from_slice(row);
            for p in extra {
                add_to_row(&self.params, h, &mut scratch, p);
            }
            if let Some(found) = self.scan_row(&scratch, &mut all_zero) {
                return found;
            }
        }
        if all_zero {
            L0Outcome::Empty
        } else {
            L0Outcome::Fail
        }
    }

    fn scan_row(&self, row: &[u64], all_zero: &mut bool) -> Option<L0Outcome> {
        for det in row.chunks_exact(self.params.stride()) {
            if det.iter().all(|&x| x == 0) {
                continue;
            }
            *all_zero = false;
            if let Some((index, value)) = self.decode_detector(det) {
                return Some(L0Outcome::Sample { index, value });
            }
        }
        None
    }

    /// One-sparse test on a single detector.
    fn decode_detector(&self, det: &[u64]) -> Option<(u64, i64)> {
        let cf = self.params.count_field;
        let (count, sum) = (det[0], det[1]);
        if count == 0 {
            return None;
        }
        let index = cf.mul(sum, cf.inv(count).ok()?);
        if index >= self.params.domain {
            return None;
        }
        let value = cf.to_signed(count);
        let fpf = PrimeField::mersenne61();
        let v = fpf.from_i64(value);
        for (i, &z) in self.key.points.iter().enumerate() {
            if det[2 + i] != fpf.mul(v, fpf.pow(z, index)) {
                return None;
            }
        }
        Some((index, value))
    }

    pub fn query(&self) -> L0Outcome {
        self.query_with(&[])
    }

    /// True when every detector reads zero.
    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.iter().all(|&x| x == 0))
    }

    fn compatible(&self, other: &Self) -> bool {
        self.params == other.params && self.seed == other.seed && self.key == other.key
    }

    /// Adds the state of a compatible sampler.
    pub fn merge_from(&mut self, other: &Self) -> Result<(), Error> {
        if !self.compatible(other) {
            return Err(Error::MergeMismatch);
        }
        let stride = self.params.stride();
        let cf = self.params.count_field;
        let fpf = PrimeField::mersenne61();
        for (mine, theirs) in self.rows.iter_mut().zip(&other.rows) {
            if mine.len() < theirs.len() {
                mine.resize(theirs.len(), 0);
            }
            for (i, (a, &b)) in mine.iter_mut().zip(theirs.iter()).enumerate() {
                *a = if i % stride < 2 { cf.add(*a, b) } else { fpf.add(*a, b) };
            }
        }
        Ok(())
    }

    /// Meter of this sampler; a shared key is charged to its group.
    pub fn bit_meter(&self) -> BitMeter {
        let p = &self.params;
        if self.key_shared {
            BitMeter::new(p.sketch_bits(), p.hash_bits()) + BitMeter::shared(self.key.group(), p.key_bits())
        } else {
            p.nominal_meter()
        }
    }
}

fn add_to_row(params: &L0Params, h: &KWiseHash, row: &mut Vec<u64>, p: &PreparedUpdate) {
    let stride = params.stride();
    let top = params.levels - 1;
    let cf = params.count_field;
    let fpf = PrimeField::mersenne61();
    let hv = h.eval_unchecked(p.index);
    let depth = if hv == 0 { top } else { (hv.trailing_zeros() as usize).min(top) };
    let need = (depth + 1) * stride;
    if row.len() < need {
        row.resize(need, 0);
    }
    for det in row[..need].chunks_exact_mut(stride) {
        det[0] = cf.add(det[0], p.count);
        det[1] = cf.add(det[1], p.index_sum);
        for i in 0..params.fingerprints {
            det[2 + i] = fpf.add(det[2 + i], p.fp[i]);
        }
    }
}

fn zero_extended_eq(a: &[u64], b: &[u64]) -> bool {
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    long[..short.len()] == *short && long[short.len()..].iter().all(|&x| x == 0)
}

impl PartialEq for L0Sampler {
    /// Semantic equality: unallocated detectors count as zero.
    fn eq(&self, other: &Self) -> bool {
        self.compatible(other) && self.rows.iter().zip(&other.rows).all(|(a, b)| zero_extended_eq(a, b))
    }
}

/// As a standalone edge sketch the sampler indexes pairs of an `n`-vertex graph.
impl LinearSketch for L0Sampler {
    fn update(&mut self, up: StreamUpdate) {
        let n = pair_domain_vertices(self.params.domain);
        let j = edge_index(up.u, up.v, n).expect("edge within sampler domain");
        self.update_index(j, up.delta as i64);
    }

    fn merge(&mut self, other: &Self) -> Result<(), Error> {
        self.merge_from(other)
    }

    fn meter(&self) -> BitMeter {
        self.bit_meter()
    }
}

/// Recovers n from a domain of size C(n, 2).
fn pair_domain_vertices(m: u64) -> u32 {
    let n = ((1.0 + (1.0 + 8.0 * m as f64).sqrt()) / 2.0).round() as u64;
    assert_eq!(n * (n - 1) / 2, m, "sampler domain is not a pair count");
    n as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_shape() {
        let p = L0Params::new(1000, 0.01, 1e-9).unwrap();
        assert_eq!(p.repetitions, 7);
        assert_eq!(p.levels, 11);
        assert_eq!(p.fingerprints, 1);
        assert_eq!(p.count_field.modulus(), 1009);
        assert_eq!(p.sketch_bits(), 77 * (2 * 10 + 61));
        assert!(L0Params::new(0, 0.1, 0.1).is_err());
        assert!(L0Params::new(10, 0.0, 0.1).is_err());
        // δ_E = 2^-120 at m ≈ 2^23 needs several fingerprints
        let big = L0Params::new(8_386_560, 0.01, 2f64.powi(-120)).unwrap();
        assert_eq!(big.fingerprints, 4);
    }

    #[test]
    fn empty_and_single() {
        let mut s = L0Sampler::new(64, 0.01, 1e-9, 3).unwrap();
        assert_eq!(s.query(), L0Outcome::Empty);
        s.update_index(5, 3);
        assert_eq!(s.query(), L0Outcome::Sample { index: 5, value: 3 });
        s.update_index(5, -3);
        assert_eq!(s.query(), L0Outcome::Empty);
        s.update_index(63, -2);
        assert_eq!(s.query(), L0Outcome::Sample { index: 63, value: -2 });
    }

    #[test]
    fn samples_lie_in_support() {
        for seed in 0..300 {
            let mut s = L0Sampler::new(500, 0.01, 1e-12, seed).unwrap();
            let support = [2u64, 7, 11, 300, 499];
            for &j in &support {
                s.update_index(j, j as i64 % 3 + 1);
            }
            // churn that cancels
            s.update_index(100, 4);
            s.update_index(100, -4);
            match s.query() {
                L0Outcome::Sample { index, value } => {
                    assert!(support.contains(&index));
                    assert_eq!(value, index as i64 % 3 + 1);
                }
                L0Outcome::Fail => {}
                L0Outcome::Empty => panic!("nonzero vector reported empty"),
            }
        }
    }

    #[test]
    fn three_point_frequencies() {
        let mut counts = [0usize; 3];
        let mut fails = 0;
        let trials = 30_000;
        for seed in 0..trials {
            let mut s = L0Sampler::new(16, 0.01, 1e-9, seed).unwrap();
            for j in [2, 7, 11] {
                s.update_index(j, 1);
            }
            match s.query() {
                L0Outcome::Sample { index: 2, .. } => counts[0] += 1,
                L0Outcome::Sample { index: 7, .. } => counts[1] += 1,
                L0Outcome::Sample { index: 11, .. } => counts[2] += 1,
                L0Outcome::Fail => fails += 1,
                other => panic!("unexpected {other:?}"),
            }
        }
        let ok = trials - fails;
        for c in counts {
            let f = c as f64 / ok as f64;
            assert!((f - 1.0 / 3.0).abs() <= 0.03, "frequency {f}");
        }
        assert!(fails as f64 / trials as f64 <= 0.01 + 0.02);
    }

    #[test]
    fn merge_and_equality() {
        let mut a = L0Sampler::new(100, 0.1, 1e-6, 9).unwrap();
        let mut b = a.clone();
        let mut whole = a.clone();
        a.update_index(3, 1);
        b.update_index(40, 1);
        b.update_index(3, -1);
        whole.update_index(40, 1);
        a.merge_from(&b).unwrap();
        assert_eq!(a, whole);
        let other = L0Sampler::new(100, 0.1, 1e-6, 10).unwrap();
        assert_eq!(a.merge_from(&other), Err(Error::MergeMismatch));
    }

    #[test]
    fn edge_sketch_roundtrip() {
        let mut s = L0Sampler::new(crate::stream::pair_count(10), 0.01, 1e-9, 1).unwrap();
        s.update(StreamUpdate::insert(7, 3));
        let j = edge_index(3, 7, 10).unwrap();
        assert_eq!(s.query(), L0Outcome::Sample { index: j, value: 1 });
        assert_eq!(s.meter().sketch_bits, s.params().sketch_bits());
    }
}
