use thiserror::Error;

/// Errors produced anywhere in the laboratory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not Hermitian (max asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("outcome spaces differ")]
    OutcomeMismatch,

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("parity of r is {actual} but plaintext bit is {expected}")]
    ParityMismatch { expected: u8, actual: u8 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("ciphertext budget exhausted: requested {requested} qubits, {remaining} remaining")]
    BudgetExhausted { requested: usize, remaining: usize },

    #[error("ambiguous result: {0} candidates passed")]
    Ambiguous(usize),

    #[error("no candidate satisfied the redundancy predicate")]
    PredicateFailure,

    #[error("bit string parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
