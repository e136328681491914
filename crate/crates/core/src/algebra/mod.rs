//! Prime fields, small extension fields and k-wise independent hashing.

mod ext;
mod field;
mod hash;
mod prime;

pub use ext::{ExtElem, ExtField};
pub use field::{PrimeField, MERSENNE_61};
pub use hash::KWiseHash;
pub use prime::{is_prime, smallest_prime_gt};
