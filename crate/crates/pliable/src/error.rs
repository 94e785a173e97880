use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a prime modulus")]
    NotPrime(u32),

    #[error("entry {value} is not reduced modulo {q}")]
    EntryOutOfRange { value: u32, q: u32 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("instance fails validation: {0}")]
    InvalidInstance(String),

    #[error("search is infeasible: {0}")]
    InfeasibleSearch(String),

    #[error("no code of length at most {k_max} satisfies the instance")]
    NoCodeWithinLimit { k_max: usize },

    #[error("internal consistency violation: {0}")]
    InternalInvariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
