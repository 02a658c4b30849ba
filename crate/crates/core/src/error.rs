use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("inadmissible input: {0}")]
    Inadmissible(String),

    #[error("unsupported case: {0}")]
    Unsupported(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("no primitive solution of x^2 = {a}*y^2 + {b}*z^2 found up to expansion factor {cap}")]
    SearchExhausted { a: u64, b: u64, cap: u64 },

    #[error("no normalized certificate for ({a}, {b}) within the search limits")]
    NormalizationFailed { a: u64, b: u64 },

    #[error("pair ({0}, {1}) is not certified totally real (raise --bound-cap, or use the annotate policy)")]
    NotTotallyReal(u64, u64),

    #[error("pair ({0}, {1}) is not totally real")]
    NotTotallyRealProved(u64, u64),

    #[error("multi-index of length {len} exceeds truncation degree {degree}")]
    Truncation { len: usize, degree: usize },

    #[error("inconsistent coefficient table: {0}")]
    Inconsistent(String),

    #[error("internal contradiction: {0}")]
    Internal(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_)
            | Error::Inadmissible(_)
            | Error::Unsupported(_)
            | Error::NotTotallyRealProved(..)
            | Error::Truncation { .. }
            | Error::Parse(_) => 2,
            Error::Capacity(_)
            | Error::SearchExhausted { .. }
            | Error::NormalizationFailed { .. }
            | Error::NotTotallyReal(..) => 3,
            Error::Inconsistent(_) | Error::Internal(_) => 1,
        }
    }
}
