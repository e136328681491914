use std::collections::BTreeMap;
use std::iter::Sum;
use std::ops::{Add, AddAssign};

use serde::Serialize;

/// Exact space accounting for a sketch.
///
/// `sketch_bits` is state that changes with the stream, `randomness_bits` is
/// stored seeds and coefficients. Randomness shared by several sketches is
/// registered under a group id and charged once however many meters carry it.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BitMeter {
    pub sketch_bits: u64,
    pub randomness_bits: u64,
    #[serde(skip)]
    shared: BTreeMap<u64, u64>,
}

impl BitMeter {
    pub fn new(sketch_bits: u64, randomness_bits: u64) -> Self {
        BitMeter { sketch_bits, randomness_bits, shared: BTreeMap::new() }
    }

    /// Randomness owned by sharing group `group`.
    pub fn shared(group: u64, bits: u64) -> Self {
        let mut m = BitMeter::default();
        m.shared.insert(group, bits);
        m
    }

    /// Scales the private parts by `k` (k identical copies); shared groups stay once.
    pub fn times(&self, k: u64) -> Self {
        BitMeter {
            sketch_bits: self.sketch_bits * k,
            randomness_bits: self.randomness_bits * k,
            shared: self.shared.clone(),
        }
    }

    /// Randomness including each shared group once.
    pub fn total_randomness(&self) -> u64 {
        self.randomness_bits + self.shared.values().sum::<u64>()
    }

    pub fn total(&self) -> u64 {
        self.sketch_bits + self.total_randomness()
    }
}

impl AddAssign<&BitMeter> for BitMeter {
    fn add_assign(&mut self, rhs: &BitMeter) {
        self.sketch_bits += rhs.sketch_bits;
        self.randomness_bits += rhs.randomness_bits;
        for (&g, &b) in &rhs.shared {
            let slot = self.shared.entry(g).or_insert(b);
            debug_assert_eq!(*slot, b, "sharing group {g} reported with two sizes");
        }
    }
}

impl Add for BitMeter {
    type Output = BitMeter;
    fn add(mut self, rhs: BitMeter) -> BitMeter {
        self += &rhs;
        self
    }
}

impl Sum for BitMeter {
    fn sum<I: Iterator<Item = BitMeter>>(iter: I) -> BitMeter {
        iter.fold(BitMeter::default(), Add::add)
    }
}
