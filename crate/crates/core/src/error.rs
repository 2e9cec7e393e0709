use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuperError {
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("matrix is singular over GF(2)")]
    Singular,

    #[error("matrix is not upper triangular with unit diagonal")]
    NotUnitUpperTriangular,

    #[error("{0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("ansatz {kind} needs at least {min} qubits, got {got}")]
    TooFewQubits { kind: String, min: usize, got: usize },

    #[error("{needed} qubits exceed the dense simulation guard of {guard}")]
    GuardExceeded { needed: usize, guard: usize },

    #[error("parameter {index} = {value} is not binary (0 or pi)")]
    NonBinaryParameter { index: usize, value: f64 },

    #[error("function returned a non-finite value at coordinate {0}")]
    NonFinite(usize),

    #[error("no perfect matching above tolerance; input is not doubly stochastic")]
    NoPerfectMatching,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl QuperError {
    /// Process exit code for command-line front ends.
    ///
    /// 2 bad usage, 3 input error, 4 budget guard.
    pub fn exit_code(&self) -> i32 {
        match self {
            QuperError::Parse(_) | QuperError::Io(_) => 3,
            QuperError::GuardExceeded { .. } | QuperError::Budget(_) => 4,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for QuperError {
    fn from(e: std::io::Error) -> Self {
        QuperError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, QuperError>;
