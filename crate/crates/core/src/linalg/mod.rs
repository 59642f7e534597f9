//! Dense complex kernels: storage, products, rotations, QR, small SVDs and rank decisions.

mod givens;
pub mod io;
mod matrix;
mod qr;
mod svd;

pub use givens::{givens_from_pair, GivensRotation};
pub use matrix::{
    adjoint_mul, anti_hermitian_part, congruence, hermitian_part, mat_mul, small_spectral_norm,
    unitarity_residual, ComplexMatrix, ONE, UNIT_ROUNDOFF, ZERO,
};
pub use qr::{qr_square, qr_tall, QrFactors, QrMode};
pub use svd::{numerical_rank_2x2, svd_two_cols, RankDecision, TwoColumnSvd};

/// Complex scalar with two `f64` components.
pub type ComplexScalar = num_complex::Complex64;
