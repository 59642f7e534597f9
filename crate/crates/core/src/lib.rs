//! Structured eigenvalue tools for unitary and unitary-plus-rank-one matrices.
//!
//! A unitary matrix is compressed to CMV-like form (block tridiagonal with 2x2 blocks
//! whose off-diagonal blocks have rank at most one), either through a block Lanczos
//! process on its Hermitian part ([`lanczos`]) or through a Householder-style sweep
//! ([`cmv`]). The compressed form is invariant under shifted QR steps, which
//! [`qriter`] exploits to compute eigenvalues, and [`rootfind`] applies the same
//! machinery to companion matrices.

pub mod cmv;
pub mod error;
pub mod generate;
pub mod lanczos;
pub mod linalg;
pub mod qriter;
pub mod report;
pub mod rng;
pub mod rootfind;
pub mod spy;

pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
