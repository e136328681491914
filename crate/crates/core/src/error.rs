use thiserror::Error;

/// Errors raised by construction, merging and decoding.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime below 2^63")]
    NotPrime(u64),
    #[error("inverse of zero")]
    InverseOfZero,
    #[error("{x} is outside the domain [0, {n})")]
    OutOfDomain { x: u64, n: u64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid edge ({u}, {v}) for n = {n}")]
    InvalidEdge { u: u32, v: u32, n: u32 },
    #[error("cannot merge sketches built with different seeds or parameters")]
    MergeMismatch,
    #[error("parameters outside the promise regime: {0}")]
    PromiseRegimeUnreachable(String),
    #[error("exhaustive search would exceed the work bound ({needed} > {bound})")]
    WorkBoundExceeded { needed: u128, bound: u128 },
    #[error("no candidate vector matches the sketch")]
    NoCandidate,
    #[error("sparse recovery failed: residual is not sparse enough")]
    RecoveryFailed,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Config(String),
}
