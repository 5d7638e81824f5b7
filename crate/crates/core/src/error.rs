use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown qubit label `{0}`")]
    UnknownLabel(String),

    #[error("duplicate qubit label `{0}`")]
    DuplicateLabel(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("operator is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("measurement basis is not orthonormal and complete (deviation {0:.3e})")]
    InvalidBasis(f64),

    #[error("Pauli axis is not a unit vector (norm² = {0})")]
    InvalidAxis(f64),

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("zero operator")]
    ZeroOperator,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("no admissible root: {0}")]
    NoRoot(String),

    #[error("crossing detection failed: {0}")]
    Crossing(String),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
