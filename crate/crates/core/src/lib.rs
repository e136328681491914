//! Linear sketches for dynamic graph streams and a single-pass approximate
//! maximum matching algorithm built from them.
//!
//! Every sketch implements [`LinearSketch`]: it is fed signed edge updates,
//! merges by coordinate-wise addition, and reports its exact size through a
//! [`BitMeter`].
//!
//! ```
//! use dynmatch::{LinearSketch, StreamUpdate};
//! use dynmatch::recovery::{L0Sampler, L0Outcome};
//!
//! let mut s = L0Sampler::new(100, 0.01, 1e-9, 7).unwrap();
//! s.update_index(5, 3);
//! s.update_index(9, 1);
//! s.update_index(9, -1);
//! assert_eq!(s.query(), L0Outcome::Sample { index: 5, value: 3 });
//! ```

pub mod algebra;
pub mod bench;
mod error;
pub mod matching;
pub mod mos;
pub mod neighborhood;
pub mod pipeline;
pub mod recovery;
pub mod snr;
pub mod sparsify;
pub mod stream;

pub use error::Error;
pub use stream::{edge_index, edge_from_index, BitMeter, LinearSketch, StreamUpdate};

/// Width at which seeds are charged by the bit meter.
pub const SEED_BITS: u64 = 64;

/// ⌈log₂ x⌉ for x ≥ 1 (0 for x ≤ 1).
pub fn ceil_log2(x: u64) -> u64 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros() as u64
    }
}

/// Derives an independent child seed from a parent seed, a role tag and an index.
pub fn derive_seed(parent: u64, tag: u64, index: u64) -> u64 {
    let mut z = parent
        ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03).rotate_left(17);
    for _ in 0..2 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}
