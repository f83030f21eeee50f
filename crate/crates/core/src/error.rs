use thiserror::Error;

/// Errors raised by the analytic engines and the Fock oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violates a mathematical precondition (normalization, range, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested state has (numerically) zero norm.
    #[error("null state: {0}")]
    NullState(String),

    /// A qubit embedding was requested for linearly dependent branch states.
    #[error("degenerate basis: overlap modulus {0} is within tolerance of 1")]
    DegenerateBasis(f64),

    /// Concurrence requested for a bipartition of Schmidt rank above two.
    #[error("concurrence is undefined for Schmidt rank {0}; use the entanglement entropy")]
    UnsupportedMeasure(usize),

    /// A size limit (branch count, Hilbert-space dimension) would be exceeded.
    #[error("capacity exceeded: {what} would be {requested}, limit is {limit}")]
    Capacity {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("mode index {index} out of range for {modes} modes")]
    ModeOutOfRange { index: usize, modes: usize },

    #[error("mode count mismatch: {0} vs {1}")]
    ModeMismatch(usize, usize),

    #[error("two-mode gate needs a common cutoff, got {0} and {1}")]
    CutoffMismatch(usize, usize),

    #[error("invalid state encoding: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
