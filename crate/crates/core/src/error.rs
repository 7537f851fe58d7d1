use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    Domain(String),
    #[error("grid with {m} samples per axis cannot resolve band N={n} (needs at least {needed})")]
    Aliasing { m: usize, n: usize, needed: usize },
    #[error("incompatible operands: {0}")]
    Mismatch(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("triple not admissible: {0}")]
    Inadmissible(String),
    #[error("undefined ratio: zero denominator")]
    UndefinedRatio,
    #[error("fixed-point iteration diverged: distance ratio {ratio:.4} over {streak} consecutive iterations; try a smaller final time")]
    Divergence { ratio: f64, streak: usize },
    #[error("matrix dimension {dim} exceeds the dense limit {limit}")]
    TooLarge { dim: usize, limit: usize },
    #[error("empty input: {0}")]
    Empty(String),
    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn mismatch(msg: impl Into<String>) -> Error {
    Error::Mismatch(msg.into())
}
