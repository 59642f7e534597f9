use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("input is not unitary: residual {residual:.3e} exceeds {tolerance:.3e}")]
    NotUnitary { residual: f64, tolerance: f64 },

    #[error("starting vector is zero")]
    ZeroStartVector,

    #[error("entry ({row}, {col}) outside the CMV-like profile has magnitude {magnitude:.3e} > {threshold:.3e}")]
    ProfileViolation {
        row: usize,
        col: usize,
        magnitude: f64,
        threshold: f64,
    },

    #[error(
        "block ({block_row}, {block_col}) has second singular value {sigma2:.3e} > {threshold:.3e}"
    )]
    CouplingRank {
        block_row: usize,
        block_col: usize,
        sigma2: f64,
        threshold: f64,
    },

    #[error("polynomial degree {0} is too small for this operation")]
    DegreeTooSmall(usize),

    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
