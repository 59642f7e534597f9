use std::ops::Range;

use super::compress::compress_to_profile;
use super::profile::CmvProfile;
use crate::error::{Error, Result};
use crate::lanczos::check_unitary;
use crate::linalg::{
    adjoint_mul, congruence, givens_from_pair, mat_mul, numerical_rank_2x2, qr_tall,
    small_spectral_norm, unitarity_residual, ComplexMatrix, QrMode, UNIT_ROUNDOFF, ZERO,
};
use crate::report::ReductionReport;
use crate::rng::{SeededRng, DEFAULT_SEED};

/// A unitary matrix in compressed CMV-like form: `t = qᴴ·u·q`.
#[derive(Clone, Debug)]
pub struct CmvLikeForm {
    pub q: ComplexMatrix,
    pub t: ComplexMatrix,
    pub profile: CmvProfile,
    pub report: ReductionReport,
}

impl CmvLikeForm {
    /// Start indices of every segment after the first.
    pub fn restart_starts(&self) -> &[usize] {
        &self.profile.segment_starts[1..]
    }
}

#[derive(Clone, Debug)]
pub struct ReductionOptions {
    /// Seed for restart vectors.
    pub seed: u64,
    /// Extra random vectors tried when a restarted segment stops after at most two columns.
    pub retries: usize,
}

impl Default for ReductionOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            retries: 3,
        }
    }
}

/// Working state shared by every segment.
#[derive(Clone)]
struct Sweep {
    t: ComplexMatrix,
    q: ComplexMatrix,
    threshold: f64,
    steps: usize,
}

/// How a segment ended.
struct SegmentEnd {
    size: usize,
    /// Norm of the coupling that vanished, if any.
    breakdown: Option<f64>,
}

impl Sweep {
    fn n(&self) -> usize {
        self.t.rows()
    }

    /// `t ← wᴴ·t·w` and `q ← q·w` for a unitary `w` acting on indices `lo..lo+k`.
    fn transform(&mut self, lo: usize, w: &ComplexMatrix) {
        let n = self.n();
        let k = w.rows();
        let rows = self.t.submatrix(lo..lo + k, 0..n);
        self.t
            .set_submatrix(lo, 0, &adjoint_mul(w, &rows).expect("k rows"));
        let cols = self.t.submatrix(0..n, lo..lo + k);
        self.t
            .set_submatrix(0, lo, &mat_mul(&cols, w).expect("k cols"));
        let qcols = self.q.submatrix(0..n, lo..lo + k);
        self.q
            .set_submatrix(0, lo, &mat_mul(&qcols, w).expect("k cols"));
    }

    /// Frobenius norm of the couplings between `inside` and everything after it.
    fn tail_coupling(&self, inside: Range<usize>) -> f64 {
        let n = self.n();
        let below = self
            .t
            .submatrix(inside.end..n, inside.clone())
            .frobenius_norm();
        let right = self
            .t
            .submatrix(inside.clone(), inside.end..n)
            .frobenius_norm();
        below.max(right)
    }

    /// Reduces the trailing block starting at `m` from the unit vector `z` (length `n − m`).
    fn segment(&mut self, m: usize, z: &ComplexMatrix) -> SegmentEnd {
        let n = self.n();
        let r = n - m;
        if r == 1 {
            return SegmentEnd {
                size: 1,
                breakdown: None,
            };
        }
        let trailing = self.t.submatrix(m..n, m..n);
        let mut d0 = ComplexMatrix::zeros(r, 2);
        d0.set_submatrix(0, 0, z);
        d0.set_submatrix(0, 1, &mat_mul(&trailing, z).expect("r x r times r x 1"));
        let start = qr_tall(&d0, QrMode::Full);
        self.transform(m, &start.q);
        self.steps += 1;
        if start.r[(1, 1)].norm() <= self.threshold {
            // z spans an invariant subspace on its own
            return SegmentEnd {
                size: 1,
                breakdown: Some(self.tail_coupling(m..m + 1)),
            };
        }
        let mut c = m;
        while c + 4 < n {
            for j in (c + 4..n).rev() {
                let sub = self.t.submatrix(j - 2..j + 1, c..c + 2);
                let sup = self.t.submatrix(c..c + 2, j - 2..j + 1);
                let us = sub.add(&sup.adjoint()).expect("3x2");
                let qs = qr_tall(&us, QrMode::Full).q;
                self.transform(j - 2, &qs);
                self.steps += 1;
            }
            let sub = self.t.submatrix(c + 2..c + 4, c..c + 2);
            let sup = self.t.submatrix(c..c + 2, c + 2..c + 4);
            let norm = small_spectral_norm(&sub).max(small_spectral_norm(&sup));
            if norm <= self.threshold {
                return SegmentEnd {
                    size: c + 2 - m,
                    breakdown: Some(norm),
                };
            }
            // A rank-one Hermitian coupling means the Krylov space may close after one
            // more column.
            let h = sub.add(&sup.adjoint()).expect("2x2");
            if numerical_rank_2x2(&h, self.threshold).sigma2() <= self.threshold {
                let col = if h.col_norm(0) >= h.col_norm(1) { 0 } else { 1 };
                let g = givens_from_pair(h[(0, col)], h[(1, col)], c + 2, c + 3);
                let w = g.adjoint().as_matrix();
                self.transform(c + 2, &w);
                let tail = self.tail_coupling(m..c + 3);
                if tail <= self.threshold {
                    return SegmentEnd {
                        size: c + 3 - m,
                        breakdown: Some(tail),
                    };
                }
            }
            c += 2;
        }
        SegmentEnd {
            size: r,
            breakdown: None,
        }
    }
}

/// [`unitary_cmv_reduction_with`] with default options.
pub fn unitary_cmv_reduction(u: &ComplexMatrix, z: &ComplexMatrix) -> Result<CmvLikeForm> {
    unitary_cmv_reduction_with(u, z, &ReductionOptions::default())
}

/// Reduces the unitary `u` to a direct sum of compressed CMV-like blocks, the first of
/// which is generated by `z` and `u·z`.
///
/// When a coupling block falls below `n·u·‖U‖_F` the current segment ends and the
/// trailing block is reduced again from a seeded random vector; a restart that stops
/// after one or two columns is retried with up to `options.retries` further vectors and
/// then with coordinate vectors, keeping the longest segment found.
pub fn unitary_cmv_reduction_with(
    u: &ComplexMatrix,
    z: &ComplexMatrix,
    options: &ReductionOptions,
) -> Result<CmvLikeForm> {
    let n = check_unitary(u, 100.0)?;
    if z.rows() != n || z.cols() != 1 {
        return Err(Error::DimensionMismatch(format!(
            "z is {}x{}, expected {n}x1",
            z.rows(),
            z.cols()
        )));
    }
    let znorm = z.frobenius_norm();
    if znorm == 0.0 {
        return Err(Error::ZeroStartVector);
    }
    let threshold = n as f64 * UNIT_ROUNDOFF * u.frobenius_norm();
    let mut sweep = Sweep {
        t: u.clone(),
        q: ComplexMatrix::identity(n),
        threshold,
        steps: 0,
    };
    let mut rng = SeededRng::new(options.seed);
    let mut sizes = Vec::new();
    let mut breakdown_norms = Vec::new();

    let mut m = 0;
    while m < n {
        let r = n - m;
        let (end, next) = if m == 0 {
            let mut s = sweep.clone();
            let end = s.segment(0, &z.scale((1.0 / znorm).into()));
            (end, s)
        } else {
            let mut best: Option<(SegmentEnd, Sweep)> = None;
            for attempt in 0..1 + options.retries + r.min(3) {
                let zt = if attempt <= options.retries {
                    rng.unit_vector(r)
                } else {
                    ComplexMatrix::unit_vector(r, attempt - 1 - options.retries)
                };
                let mut s = sweep.clone();
                let end = s.segment(m, &zt);
                let good = end.size > 2 || end.size == r;
                if best.as_ref().is_none_or(|(b, _)| end.size > b.size) {
                    best = Some((end, s));
                }
                if good {
                    break;
                }
            }
            best.expect("at least one attempt")
        };
        sweep = next;
        if let Some(norm) = end.breakdown {
            breakdown_norms.push(norm);
        }
        sizes.push(end.size);
        m += end.size;
    }

    // segments are independent: clear what couples them
    let profile = CmvProfile::from_segment_sizes(&sizes);
    let mut max_cross_segment: f64 = 0.0;
    let segments = profile.segments();
    for a in &segments {
        for b in &segments {
            if a == b {
                continue;
            }
            for j in b.clone() {
                for i in a.clone() {
                    max_cross_segment = max_cross_segment.max(sweep.t[(i, j)].norm());
                    sweep.t[(i, j)] = ZERO;
                }
            }
        }
    }

    let compressed = compress_to_profile(&sweep.t, &profile, 10.0 * threshold)?;
    let mut q = sweep.q;
    compressed.apply_to(&mut q);
    let t = compressed.t;
    let report = ReductionReport {
        residual: congruence(&q, u)?.sub(&t)?.frobenius_norm(),
        unitarity: unitarity_residual(&q)?,
        breakdown_step: None,
        breakdown_norms,
        deflation_threshold: threshold,
        steps: sweep.steps,
        max_off_profile: compressed.max_off_profile,
        max_cross_segment,
    };
    Ok(CmvLikeForm {
        q,
        t,
        profile: compressed.profile,
        report,
    })
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::cmv::{verify_cmv_like, verify_rank_pattern};
    use crate::generate::{circulant_generator, fourier, haar_unitary};

    fn check(form: &CmvLikeForm, u: &ComplexMatrix) {
        let n = u.rows() as f64;
        let bound = 10.0 * n * UNIT_ROUNDOFF * u.frobenius_norm();
        assert!(
            form.report.unitarity <= 10.0 * n * UNIT_ROUNDOFF,
            "{:?}",
            form.report
        );
        assert!(form.report.residual <= bound, "{:?}", form.report);
        let v = verify_cmv_like(&form.t, &form.profile, bound);
        assert!(v.passed(), "{v:?}");
    }

    #[test]
    fn haar_sixteen_is_one_segment() {
        let u = haar_unitary(16, 7);
        let form = unitary_cmv_reduction(&u, &SeededRng::new(2).unit_vector(16)).unwrap();
        assert_eq!(form.profile.segment_starts, vec![0]);
        assert_eq!(form.profile.block_sizes, vec![2; 8]);
        check(&form, &u);
        let thr = 10.0 * 16.0 * UNIT_ROUNDOFF * u.frobenius_norm();
        assert!(verify_rank_pattern(&form.t, thr).passed());
    }

    #[test]
    fn odd_order() {
        for n in [3, 5, 7, 9] {
            let u = haar_unitary(n, n as u64);
            let form = unitary_cmv_reduction(&u, &SeededRng::new(5).unit_vector(n)).unwrap();
            assert_eq!(form.profile.segment_starts, vec![0], "n = {n}");
            assert_eq!(*form.profile.block_sizes.last().unwrap(), 1);
            check(&form, &u);
        }
    }

    #[test]
    fn identity_splits_into_scalars() {
        let u = ComplexMatrix::identity(4);
        let form = unitary_cmv_reduction(&u, &ComplexMatrix::unit_vector(4, 0)).unwrap();
        assert_eq!(form.profile.segments().len(), 4);
        for j in 0..4 {
            for i in 0..4 {
                if i == j {
                    assert!((form.t[(i, j)] - 1.0).norm() < 1e-15);
                } else {
                    assert_eq!(form.t[(i, j)], ZERO);
                }
            }
        }
        check(&form, &u);
    }

    #[test]
    fn fourier_thirty_two_has_eight_segments() {
        let u = fourier(32);
        let form = unitary_cmv_reduction(&u, &SeededRng::new(1).unit_vector(32)).unwrap();
        assert_eq!(
            form.profile.segments().len(),
            8,
            "{:?}",
            form.profile.segment_starts
        );
        assert_eq!(form.report.breakdown_norms.len(), 7);
        assert!(form.report.breakdown_norms.iter().all(|&b| b <= 1e-12));
        check(&form, &u);
    }

    #[test]
    fn direct_sum_restarts_at_the_boundary() {
        let a = haar_unitary(8, 21);
        let b = haar_unitary(8, 22);
        let mut u = ComplexMatrix::zeros(16, 16);
        u.set_submatrix(0, 0, &a);
        u.set_submatrix(8, 8, &b);
        let mut z = ComplexMatrix::zeros(16, 1);
        z.set_submatrix(0, 0, &SeededRng::new(3).unit_vector(8));
        let form = unitary_cmv_reduction(&u, &z).unwrap();
        assert_eq!(form.profile.segment_starts, vec![0, 8]);
        check(&form, &u);
    }

    #[test]
    fn circulant_matches_compressed_profile() {
        let u = circulant_generator(16);
        let form = unitary_cmv_reduction(&u, &SeededRng::new(1).unit_vector(16)).unwrap();
        assert_eq!(form.profile, CmvProfile::single(16));
        check(&form, &u);
        // first column of q stays parallel to z
        let z = SeededRng::new(1).unit_vector(16);
        let overlap = adjoint_mul(&form.q.submatrix(0..16, 0..1), &z).unwrap()[(0, 0)].norm();
        assert!((overlap - 1.0).abs() < 1e-13);
    }

    #[test]
    fn rejects_zero_vector_and_non_unitary() {
        let u = ComplexMatrix::identity(3);
        assert_eq!(
            unitary_cmv_reduction(&u, &ComplexMatrix::zeros(3, 1)).unwrap_err(),
            Error::ZeroStartVector
        );
        let mut bad = u.clone();
        bad[(2, 0)] = Complex64::new(0.5, 0.0);
        assert!(matches!(
            unitary_cmv_reduction(&bad, &ComplexMatrix::unit_vector(3, 0)),
            Err(Error::NotUnitary { .. })
        ));
    }
}
