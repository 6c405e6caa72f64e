use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("invalid bath specification: {0}")]
    InvalidBath(String),

    #[error(
        "transition frequency omega_{mode} = {omega:e} is not above the positivity floor {floor:e}"
    )]
    NonPositiveFrequency { mode: usize, omega: f64, floor: f64 },

    #[error("expected a string of length {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("combinadic rank {rank} out of range 1..={max} for weight {weight}")]
    RankOutOfRange { weight: usize, rank: u64, max: u64 },

    #[error("site index {site} out of range for a chain of {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("invalid site pair ({r}, {s}): need 1 <= r < s <= {n_sites}")]
    InvalidPair { r: usize, s: usize, n_sites: usize },

    #[error("{what} requires N <= {limit}, got N = {n_sites}")]
    SizeLimit {
        what: &'static str,
        n_sites: usize,
        limit: usize,
    },

    #[error("kernel of the generator has dimension {dimension}, expected 1")]
    AmbiguousKernel { dimension: usize },

    #[error("{0}")]
    Oracle(String),
}

pub type Result<T> = std::result::Result<T, Error>;
