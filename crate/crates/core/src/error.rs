use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Operands of incompatible shape or kind.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A precondition on an argument was violated.
    #[error("invalid argument: {0}")]
    Usage(String),

    /// A protocol was configured inconsistently with what it measures.
    #[error("configuration error: {0}")]
    Configuration(String),

    /// The interference phase is undefined because visibility vanishes.
    #[error("relative phase undefined: visibility {0:e} is below threshold")]
    PhaseUndefined(f64),

    /// A numerical invariant (hermiticity, trace, positivity) was breached.
    #[error("numerical contract violated: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
