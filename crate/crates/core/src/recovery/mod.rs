//! The two standard building blocks: an L0 sampler and deterministic
//! k-sparse recovery over a prime field.

mod l0;
mod sparse;

pub use l0::{FingerprintKey, L0Outcome, L0Params, L0Sampler, PreparedUpdate, LEVEL_INDEPENDENCE};
pub use sparse::FqSparseRecovery;
