use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("component {index} is not finite")]
    NonFinite { index: usize },

    #[error("atom {0} is out of range for this scheme")]
    AtomOutOfRange(String),

    #[error("invalid scheme: {0}")]
    InvalidScheme(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("the scheme has no atom restoring to the origin")]
    NoZeroAtom,

    /// The restored weight vector became the zero vector, so no margin
    /// direction exists.
    #[error("weights restore to the zero vector at step {step}")]
    DegenerateWeights { step: usize },

    /// A guarantee check was requested on an instance that violates its
    /// hypotheses. This is not a failed check.
    #[error("guarantee not applicable: {0}")]
    Inapplicable(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("cannot generate dataset: {0}")]
    Generation(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
