//! Block Lanczos reduction of the Hermitian part of a unitary matrix.
//!
//! Starting from the block `[z | Uz]`, the three-term block recurrence builds a unitary
//! `Q` with `Qᴴ·U_H·Q` Hermitian block tridiagonal. When the start block is `[z | Uz]`
//! the same `Q` also reduces `U_AH` and therefore `U` itself, and the off-diagonal blocks
//! of `QᴴUQ` have rank one. A candidate block that vanishes before `n` columns are built
//! is reported as [`PrematureStop`] so that a caller can restart.

use crate::cmv::CmvProfile;
use crate::error::{Error, Result};
use crate::linalg::{
    adjoint_mul, anti_hermitian_part, congruence, mat_mul, numerical_rank_2x2, qr_tall,
    svd_two_cols, unitarity_residual, ComplexMatrix, QrMode, RankDecision, UNIT_ROUNDOFF,
};
use crate::report::ReductionReport;

/// Result of a completed reduction: `t = Qᴴ·U_H·Q`.
#[derive(Clone, Debug)]
pub struct BlockTridiagonalForm {
    pub q: ComplexMatrix,
    pub t: ComplexMatrix,
    pub block_sizes: Vec<usize>,
    pub restart_starts: Vec<usize>,
    pub report: ReductionReport,
}

impl BlockTridiagonalForm {
    pub fn profile(&self) -> CmvProfile {
        CmvProfile::block_tridiagonal(self.block_sizes.clone())
    }
}

/// The candidate block vanished at `breakdown_step`.
#[derive(Clone, Debug)]
pub struct PrematureStop {
    /// The orthonormal columns built so far (`n x Σ block_sizes`).
    pub q: ComplexMatrix,
    pub block_sizes: Vec<usize>,
    pub breakdown_step: usize,
    /// Largest singular value of the candidate block at every step, including the last.
    pub breakdown_norms: Vec<f64>,
}

#[derive(Clone, Debug)]
pub enum LanczosOutcome {
    Complete(BlockTridiagonalForm),
    PrematureStop(PrematureStop),
}

impl LanczosOutcome {
    pub fn complete(self) -> Option<BlockTridiagonalForm> {
        match self {
            Self::Complete(f) => Some(f),
            Self::PrematureStop(_) => None,
        }
    }

    pub fn breakdown_step(&self) -> Option<usize> {
        match self {
            Self::Complete(_) => None,
            Self::PrematureStop(p) => Some(p.breakdown_step),
        }
    }
}

pub(crate) fn check_unitary(u: &ComplexMatrix, factor: f64) -> Result<usize> {
    let n = u.require_square()?;
    let residual = unitarity_residual(u)?;
    let tolerance = factor * n as f64 * UNIT_ROUNDOFF;
    if residual > tolerance {
        return Err(Error::NotUnitary {
            residual,
            tolerance,
        });
    }
    Ok(n)
}

fn hstack(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows(), a.cols() + b.cols());
    out.set_submatrix(0, 0, a);
    out.set_submatrix(0, a.cols(), b);
    out
}

/// `w ← w − q·(qᴴ·w)`.
fn project_out(w: &mut ComplexMatrix, q: &ComplexMatrix) {
    if q.cols() == 0 {
        return;
    }
    let coeffs = adjoint_mul(q, w).expect("same row count");
    let proj = mat_mul(q, &coeffs).expect("conformant");
    *w = w.sub(&proj).expect("same shape");
}

/// Block Lanczos on `u_h = hermitian_part(u)` with start block `[z | u·z]`.
pub fn block_lanczos(
    u_h: &ComplexMatrix,
    z: &ComplexMatrix,
    u: &ComplexMatrix,
) -> Result<LanczosOutcome> {
    let n = check_unitary(u, 100.0)?;
    if u_h.rows() != n || u_h.cols() != n || z.rows() != n || z.cols() != 1 {
        return Err(Error::DimensionMismatch(format!(
            "u is {n}x{n}, u_h is {}x{}, z is {}x{}",
            u_h.rows(),
            u_h.cols(),
            z.rows(),
            z.cols()
        )));
    }
    if z.frobenius_norm() == 0.0 {
        return Err(Error::ZeroStartVector);
    }
    // the projected residual of an exhausted Krylov space sits at about n·u·‖U‖_F itself,
    // so the rank cut carries the same factor 10 as the verifiers
    let threshold = 10.0 * n as f64 * UNIT_ROUNDOFF * u.frobenius_norm();

    let d0 = hstack(z, &mat_mul(u, z)?);
    let start = svd_two_cols(&d0, Some(threshold));
    let s = start.decision.numerical_rank.min(n);
    if s == 0 {
        return Err(Error::ZeroStartVector);
    }

    let mut q = ComplexMatrix::zeros(n, n);
    let mut t = ComplexMatrix::zeros(n, n);
    q.set_submatrix(0, 0, &start.g.submatrix(0..n, 0..s));
    let mut block_sizes = vec![s];
    let (mut s0, mut s1) = (0usize, s);
    let mut prev: Option<(usize, usize)> = None;
    let mut step = 0;
    let mut norms = Vec::new();

    while s1 < n {
        step += 1;
        let qc = q.submatrix(0..n, s0..s1);
        let mut w = mat_mul(u_h, &qc)?;
        let a = adjoint_mul(&qc, &w)?;
        t.set_submatrix(s0, s0, &a);
        w = w.sub(&mat_mul(&qc, &a)?)?;
        if let Some((p0, p1)) = prev {
            let qp = q.submatrix(0..n, p0..p1);
            let b = t.submatrix(p0..p1, s0..s1);
            w = w.sub(&mat_mul(&qp, &b)?)?;
        }
        // one full re-orthogonalisation pass against every column built so far
        let built = q.submatrix(0..n, 0..s1);
        project_out(&mut w, &built);

        let svd = svd_two_cols(&w, Some(threshold));
        norms.push(svd.decision.sigma1());
        let snew = svd.decision.numerical_rank.min(n - s1);
        if snew == 0 {
            return Ok(LanczosOutcome::PrematureStop(PrematureStop {
                q: built,
                block_sizes,
                breakdown_step: step,
                breakdown_norms: norms,
            }));
        }

        let mut g = svd.g.submatrix(0..n, 0..snew);
        project_out(&mut g, &built);
        let g = qr_tall(&g, QrMode::Thin).q;

        // coupling block R(1:snew,1:snew)·V(:,1:snew)ᴴ, i.e. T(new, current)
        let coupling = ComplexMatrix::from_fn(snew, s1 - s0, |i, j| {
            svd.v[(j, i)].conj() * svd.decision.singular_values[i]
        });

        prev = Some((s0, s1));
        s0 = s1;
        s1 += snew;
        q.set_submatrix(0, s0, &g);
        let (p0, _) = prev.expect("just set");
        t.set_submatrix(s0, p0, &coupling);
        t.set_submatrix(p0, s0, &coupling.adjoint());
        block_sizes.push(snew);
    }
    let qc = q.submatrix(0..n, s0..s1);
    t.set_submatrix(s0, s0, &congruence(&qc, u_h)?);

    let th_check = congruence(&q, u_h)?;
    let report = ReductionReport {
        residual: th_check.sub(&t)?.frobenius_norm(),
        unitarity: unitarity_residual(&q)?,
        breakdown_step: None,
        breakdown_norms: norms,
        deflation_threshold: threshold,
        steps: step,
        ..Default::default()
    };
    Ok(LanczosOutcome::Complete(BlockTridiagonalForm {
        q,
        t,
        block_sizes,
        restart_starts: Vec::new(),
        report,
    }))
}

/// Off-profile maxima of `QᴴU_HQ`, `QᴴU_AHQ` and `QᴴUQ` against the block tridiagonal
/// profile of a completed reduction.
#[derive(Clone, Debug, PartialEq)]
pub struct SimultaneousReduction {
    pub off_profile_hermitian: f64,
    pub off_profile_anti_hermitian: f64,
    pub off_profile_unitary: f64,
    /// `10·n·u·‖U‖_F`.
    pub tolerance: f64,
    pub report: ReductionReport,
}

impl SimultaneousReduction {
    pub fn passed(&self) -> bool {
        self.off_profile_hermitian <= self.tolerance
            && self.off_profile_anti_hermitian <= self.tolerance
            && self.off_profile_unitary <= self.tolerance
    }
}

pub fn verify_simultaneous_reduction(
    form: &BlockTridiagonalForm,
    u: &ComplexMatrix,
) -> Result<SimultaneousReduction> {
    let n = u.require_square()?;
    let profile = form.profile();
    let u_h = crate::linalg::hermitian_part(u)?;
    let u_ah = anti_hermitian_part(u)?;
    let t_h = congruence(&form.q, &u_h)?;
    let t_ah = congruence(&form.q, &u_ah)?;
    let t = congruence(&form.q, u)?;
    let mut report = form.report.clone();
    report.residual = t_h.sub(&form.t)?.frobenius_norm();
    report.unitarity = unitarity_residual(&form.q)?;
    Ok(SimultaneousReduction {
        off_profile_hermitian: profile.max_off_profile(&t_h).0,
        off_profile_anti_hermitian: profile.max_off_profile(&t_ah).0,
        off_profile_unitary: profile.max_off_profile(&t).0,
        tolerance: 10.0 * n as f64 * UNIT_ROUNDOFF * u.frobenius_norm(),
        report,
    })
}

/// Rank decisions for every subdiagonal block followed by every superdiagonal block of
/// `t` under the block partition `block_sizes`.
pub fn offdiag_block_ranks(
    t: &ComplexMatrix,
    block_sizes: &[usize],
    scale: f64,
) -> Vec<RankDecision> {
    let profile = CmvProfile::block_tridiagonal(block_sizes.to_vec());
    let pairs = profile.coupled_block_pairs();
    let sub = pairs.iter().map(|&(lo, hi)| {
        numerical_rank_2x2(
            &t.submatrix(profile.block_range(lo), profile.block_range(hi)),
            scale,
        )
    });
    let sup = pairs.iter().map(|&(lo, hi)| {
        numerical_rank_2x2(
            &t.submatrix(profile.block_range(hi), profile.block_range(lo)),
            scale,
        )
    });
    sub.chain(sup).collect()
}

/// Rank decisions for the off-diagonal blocks of `T = QᴴUQ` (not of `T_H`).
pub fn offdiag_rank_check(
    form: &BlockTridiagonalForm,
    u: &ComplexMatrix,
    scale: f64,
) -> Result<Vec<RankDecision>> {
    let t = congruence(&form.q, u)?;
    Ok(offdiag_block_ranks(&t, &form.block_sizes, scale))
}

/// Fourier-type convenience: `block_lanczos` with `u_h` derived from `u`.
pub fn block_lanczos_unitary(u: &ComplexMatrix, z: &ComplexMatrix) -> Result<LanczosOutcome> {
    let u_h = crate::linalg::hermitian_part(u)?;
    block_lanczos(&u_h, z, u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{circulant_generator, fourier, haar_unitary};
    use crate::rng::SeededRng;

    #[test]
    fn identity_stops_at_first_step() {
        let u = ComplexMatrix::identity(4);
        let z = ComplexMatrix::unit_vector(4, 0);
        let out = block_lanczos_unitary(&u, &z).unwrap();
        match out {
            LanczosOutcome::PrematureStop(p) => {
                assert_eq!(p.breakdown_step, 1);
                assert_eq!(p.block_sizes, vec![1]);
            }
            LanczosOutcome::Complete(_) => panic!("identity cannot be reduced"),
        }
    }

    #[test]
    fn fourier_eight_stops_early() {
        let u = fourier(8);
        let mut rng = SeededRng::new(21);
        for _ in 0..5 {
            let z = rng.unit_vector(8);
            let step = block_lanczos_unitary(&u, &z).unwrap().breakdown_step();
            assert!(matches!(step, Some(s) if s <= 3), "{step:?}");
        }
    }

    #[test]
    fn circulant_sixteen_completes_with_pairs() {
        let n = 16;
        let u = circulant_generator(n);
        let z = SeededRng::new(3).unit_vector(n);
        let form = block_lanczos_unitary(&u, &z)
            .unwrap()
            .complete()
            .expect("no breakdown");
        assert_eq!(form.block_sizes, vec![2; 8]);
        let bound = 10.0 * n as f64 * UNIT_ROUNDOFF * u.frobenius_norm();
        assert!(form.report.residual <= bound, "{}", form.report.residual);
        assert!(form.report.unitarity <= 10.0 * n as f64 * UNIT_ROUNDOFF);
        assert!(form.t.sub(&form.t.adjoint()).unwrap().frobenius_norm() <= bound);

        let check = verify_simultaneous_reduction(&form, &u).unwrap();
        assert!(check.passed(), "{check:?}");
        assert!(check.off_profile_unitary <= 1e-13);

        let thr = n as f64 * UNIT_ROUNDOFF * u.frobenius_norm();
        for d in offdiag_rank_check(&form, &u, thr).unwrap() {
            assert!(d.sigma2() <= thr, "{d:?}");
        }
        // the Hermitian part's own couplings are of full rank
        for d in offdiag_block_ranks(&form.t, &form.block_sizes, thr) {
            assert_eq!(d.numerical_rank, 2);
        }
    }

    #[test]
    fn odd_order_ends_with_single_column() {
        let n = 7;
        let u = haar_unitary(n, 5);
        let z = SeededRng::new(6).unit_vector(n);
        let form = block_lanczos_unitary(&u, &z).unwrap().complete().unwrap();
        assert_eq!(form.block_sizes, vec![2, 2, 2, 1]);
        assert!(verify_simultaneous_reduction(&form, &u).unwrap().passed());
    }

    #[test]
    fn haar_twelve_has_rank_one_couplings() {
        let n = 12;
        let u = haar_unitary(n, 12);
        let z = SeededRng::new(1).unit_vector(n);
        let form = block_lanczos_unitary(&u, &z).unwrap().complete().unwrap();
        let scale = 10.0 * n as f64 * UNIT_ROUNDOFF * u.frobenius_norm();
        for d in offdiag_rank_check(&form, &u, scale).unwrap() {
            assert!(d.sigma2() <= scale);
            assert_eq!(d.numerical_rank, 1);
        }
    }

    #[test]
    fn deterministic_breakdown() {
        let u = fourier(16);
        let z = SeededRng::new(77).unit_vector(16);
        let a = block_lanczos_unitary(&u, &z).unwrap().breakdown_step();
        let b = block_lanczos_unitary(&u, &z).unwrap().breakdown_step();
        assert_eq!(a, b);
        assert!(a.is_some());
    }

    #[test]
    fn rejects_bad_inputs() {
        let u = ComplexMatrix::identity(3);
        assert_eq!(
            block_lanczos_unitary(&u, &ComplexMatrix::zeros(3, 1)).unwrap_err(),
            Error::ZeroStartVector
        );
        let mut bad = u.clone();
        bad[(0, 0)] = num_complex::Complex64::new(2.0, 0.0);
        assert!(matches!(
            block_lanczos_unitary(&bad, &ComplexMatrix::unit_vector(3, 0)),
            Err(Error::NotUnitary { .. })
        ));
    }
}
