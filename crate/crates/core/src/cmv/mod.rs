//! Householder-style reduction of a unitary matrix to CMV-like form.
//!
//! The reduction works on `U + Uᴴ` with 3x3 reflectors, restarts on a fresh vector when
//! the block Krylov space is exhausted and finally compresses every rank-one coupling
//! block to a single column with plane rotations.

mod compress;
mod profile;
mod reduce;
mod verify;

pub use compress::{compress_to_profile, Compression};
pub use profile::{CmvProfile, ProfileShape};
pub use reduce::{
    unitary_cmv_reduction, unitary_cmv_reduction_with, CmvLikeForm, ReductionOptions,
};
pub use verify::{
    verify_cmv_like, verify_rank_pattern, CmvCheck, RankPatternEntry, RankPatternReport,
    RankPatternStatus, Violation,
};
