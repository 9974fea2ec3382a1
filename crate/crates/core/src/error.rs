use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix has {len} entries, expected {rows}x{cols}")]
    Shape {
        rows: usize,
        cols: usize,
        len: usize,
    },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("Hilbert-space dimension {0} exceeds the cap of {cap}", cap = crate::qmath::MAX_HILBERT_DIM)]
    DimensionCap(usize),

    #[error("invalid subsystem index {index} for a profile with {len} subsystems")]
    InvalidSubsystem { index: usize, len: usize },

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("not a density operator: {0}")]
    NotDensity(String),

    #[error("not a valid channel: {0}")]
    InvalidChannel(String),

    #[error("group axioms violated: {0}")]
    GroupAxiom(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("numerical routine failed: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
