use thiserror::Error;

/// Errors raised by profile construction, distribution queries, and rules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("profile must contain at least one trial")]
    EmptyProfile,

    #[error("theta must be a positive finite number, got {0}")]
    InvalidTheta(f64),

    #[error("success probability at trial {index} is {value}, expected 0 < p <= 1")]
    ProbabilityOutOfRange { index: usize, value: f64 },

    #[error("odds are infinite at trial {index} (p = 1)")]
    InfiniteOdds { index: usize },

    #[error("trial index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("suffix end {end} exceeds profile length {len}")]
    EndOutOfRange { end: usize, len: usize },

    #[error("target rank m = {m} out of range 1..={max}")]
    RankOutOfRange { m: usize, max: usize },

    #[error("mean {mu} outside [0, {n}]")]
    MeanOutOfRange { mu: f64, n: usize },

    #[error("replication count must be at least 1")]
    NoReplications,

    #[error("Poisson mean must be positive and finite, got {0}")]
    InvalidPoissonMean(f64),

    #[error(
        "distribution over trials {start}..={end} is incomplete: {overflow:e} mass above cap {cap}"
    )]
    IncompleteDistribution {
        start: usize,
        end: usize,
        cap: usize,
        overflow: f64,
    },

    #[error("invalid mass at index {index}: {value}")]
    InvalidMass { index: usize, value: f64 },

    #[error("elementary symmetric sum overflowed at order {order}")]
    Overflow { order: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// `true` for errors caused by bad input rather than by a computation.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::Overflow { .. } | Error::IncompleteDistribution { .. } | Error::Io(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
