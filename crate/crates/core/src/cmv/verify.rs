use serde::Serialize;

use super::profile::CmvProfile;
use crate::linalg::{
    numerical_rank_2x2, unitarity_residual, ComplexMatrix, RankDecision, UNIT_ROUNDOFF,
};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Violation {
    /// Entry outside the profile above the threshold.
    OffProfile {
        row: usize,
        col: usize,
        magnitude: f64,
    },
    /// Off-diagonal block `(block_row, block_col)` whose second singular value exceeds
    /// the threshold.
    CouplingRank {
        block_row: usize,
        block_col: usize,
        sigma2: f64,
    },
    NotUnitary {
        residual: f64,
        tolerance: f64,
    },
    DimensionMismatch {
        matrix: usize,
        profile: usize,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CmvCheck {
    pub violations: Vec<Violation>,
    pub max_off_profile: f64,
    pub max_coupling_sigma2: f64,
    pub unitarity: f64,
}

impl CmvCheck {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that `t` fits `profile` up to `threshold`, that every off-diagonal block has
/// numerical rank at most one and that `t` is unitary to `10·n·u`.
pub fn verify_cmv_like(t: &ComplexMatrix, profile: &CmvProfile, threshold: f64) -> CmvCheck {
    let mut check = CmvCheck::default();
    if !t.is_square() || t.rows() != profile.n {
        check.violations.push(Violation::DimensionMismatch {
            matrix: t.rows(),
            profile: profile.n,
        });
        return check;
    }
    let n = t.rows();
    check.max_off_profile = profile.max_off_profile(t).0;
    for (row, col, magnitude) in profile.off_profile_entries(t, threshold) {
        check.violations.push(Violation::OffProfile {
            row,
            col,
            magnitude,
        });
    }
    for (hi, lo) in profile.coupled_block_pairs() {
        for (br, bc) in [(hi, lo), (lo, hi)] {
            let block = t.submatrix(profile.block_range(br), profile.block_range(bc));
            let sigma2 = numerical_rank_2x2(&block, threshold).sigma2();
            check.max_coupling_sigma2 = check.max_coupling_sigma2.max(sigma2);
            if sigma2 > threshold {
                check.violations.push(Violation::CouplingRank {
                    block_row: br,
                    block_col: bc,
                    sigma2,
                });
            }
        }
    }
    check.unitarity = unitarity_residual(t).expect("square");
    let tolerance = 10.0 * n as f64 * UNIT_ROUNDOFF;
    if check.unitarity > tolerance {
        check.violations.push(Violation::NotUnitary {
            residual: check.unitarity,
            tolerance,
        });
    }
    check
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RankPatternStatus {
    Passed,
    Failed,
    /// The coupling column the argument relies on is numerically zero.
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankPatternEntry {
    /// One-based block index `k`; the tested block is `T(2k+1:2k+2, 2k:2k+1)` in one-based
    /// indices.
    pub k: usize,
    pub status: RankPatternStatus,
    pub decision: RankDecision,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RankPatternReport {
    pub entries: Vec<RankPatternEntry>,
}

impl RankPatternReport {
    pub fn passed(&self) -> bool {
        self.entries
            .iter()
            .all(|e| e.status != RankPatternStatus::Failed)
    }

    pub fn skipped(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| e.status == RankPatternStatus::Skipped)
            .count()
    }
}

/// For a compressed unitary CMV-like `t`, the 2x2 block straddling the last column of
/// block `k` and the first column of block `k+1`, taken in the rows of block `k+1`, has
/// rank exactly one whenever the coupling column `T(rows of block k+1, last of block k)`
/// is nonzero. Checked for `1 ≤ k ≤ n/2 − 2`.
pub fn verify_rank_pattern(t: &ComplexMatrix, threshold: f64) -> RankPatternReport {
    let n = t.rows();
    let mut report = RankPatternReport::default();
    for k in 1..(n / 2).saturating_sub(1) {
        let rows = 2 * k..2 * k + 2;
        let cols = 2 * k - 1..2 * k + 1;
        let coupling = t.submatrix(rows.clone(), 2 * k - 1..2 * k).frobenius_norm();
        let decision = numerical_rank_2x2(&t.submatrix(rows, cols), threshold);
        let status = if coupling <= threshold {
            RankPatternStatus::Skipped
        } else if decision.sigma2() <= threshold && decision.sigma1() > threshold {
            RankPatternStatus::Passed
        } else {
            RankPatternStatus::Failed
        };
        report.entries.push(RankPatternEntry {
            k,
            status,
            decision,
        });
    }
    report
}
