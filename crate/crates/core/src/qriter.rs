//! Shifted QR iteration on CMV-like matrices.
//!
//! A single step `t − γI = QR`, `t₁ = RQ + γI` maps a unitary CMV-like matrix to another
//! one with the same profile. [`eigensolve_unitary`] repeats such steps on active
//! windows, splitting the matrix whenever a coupling falls below `n·u·‖t‖_F`, and
//! [`qr_step_perturbed`] performs the step on a unitary-plus-rank-one matrix while
//! keeping track of its unitary part and its correction.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::cmv::{verify_cmv_like, CmvProfile, ProfileShape, Violation};
use crate::error::{Error, Result};
use crate::linalg::{
    adjoint_mul, mat_mul, numerical_rank_2x2, qr_square, unitarity_residual, ComplexMatrix,
    QrFactors, UNIT_ROUNDOFF, ZERO,
};
use crate::report::{ComplexJson, DeflationEvent, IterationReportJson};
use crate::rootfind::PerturbedCmvForm;

/// Steps without a split after which an exceptional shift is used.
const EXCEPTIONAL_PERIOD: usize = 10;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum ShiftStrategy {
    Zero,
    /// The trailing diagonal entry.
    Rayleigh,
    /// The eigenvalue of the trailing 2x2 block closest to the trailing diagonal entry.
    #[default]
    Wilkinson,
    Custom(Complex64),
}

impl ShiftStrategy {
    /// Shift for the square matrix `t`.
    pub fn shift(&self, t: &ComplexMatrix) -> Complex64 {
        let n = t.rows();
        match *self {
            Self::Zero => ZERO,
            Self::Custom(g) => g,
            Self::Rayleigh => t[(n - 1, n - 1)],
            Self::Wilkinson => {
                let d = t[(n - 1, n - 1)];
                if n < 2 {
                    return d;
                }
                let [l1, l2] = eig2(t[(n - 2, n - 2)], t[(n - 2, n - 1)], t[(n - 1, n - 2)], d);
                if (l1 - d).norm() <= (l2 - d).norm() {
                    l1
                } else {
                    l2
                }
            }
        }
    }
}

impl FromStr for ShiftStrategy {
    type Err = Error;

    /// `zero`, `rayleigh`, `wilkinson` or `re,im`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "zero" => Ok(Self::Zero),
            "rayleigh" => Ok(Self::Rayleigh),
            "wilkinson" => Ok(Self::Wilkinson),
            other => {
                let (re, im) = other
                    .split_once(',')
                    .ok_or_else(|| Error::Parse(format!("unknown shift {other:?}")))?;
                let part = |x: &str| {
                    x.trim()
                        .parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| Error::Parse(format!("bad shift component {x:?}")))
                };
                Ok(Self::Custom(Complex64::new(part(re)?, part(im)?)))
            }
        }
    }
}

impl fmt::Display for ShiftStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => f.write_str("zero"),
            Self::Rayleigh => f.write_str("rayleigh"),
            Self::Wilkinson => f.write_str("wilkinson"),
            Self::Custom(g) => write!(f, "{},{}", g.re, g.im),
        }
    }
}

/// Eigenvalues of `[[a, b], [c, d]]`.
pub fn eig2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> [Complex64; 2] {
    let mean = (a + d) * 0.5;
    let half = (a - d) * 0.5;
    let root = (half * half + b * c).sqrt();
    let (plus, minus) = (mean + root, mean - root);
    let (big, other) = if plus.norm() >= minus.norm() {
        (plus, minus)
    } else {
        (minus, plus)
    };
    if big == ZERO {
        return [big, other];
    }
    // the smaller root from the determinant avoids cancellation
    [big, (a * d - b * c) / big]
}

/// QR of `t − γI`, moving γ away from an eigenvalue when `R` is numerically singular.
fn shifted_qr(t: &ComplexMatrix, gamma: Complex64, scale: f64) -> (QrFactors, Complex64, bool) {
    let n = t.rows();
    let factor = |g: Complex64| {
        let mut a = t.clone();
        a.shift_diagonal(-g);
        qr_square(&a)
    };
    let tiny = n as f64 * UNIT_ROUNDOFF * scale;
    let qr = factor(gamma);
    let min_r = (0..n)
        .map(|i| qr.r[(i, i)].norm())
        .fold(f64::INFINITY, f64::min);
    if min_r >= tiny {
        return (qr, gamma, false);
    }
    let eps = 10.0 * n as f64 * UNIT_ROUNDOFF;
    let moved = if gamma == ZERO {
        Complex64::new(eps * scale / (n as f64).sqrt(), 0.0)
    } else {
        gamma * (1.0 + eps)
    };
    (factor(moved), moved, true)
}

/// `RQ + γI`.
fn recombine(qr: &QrFactors, gamma: Complex64) -> ComplexMatrix {
    let mut next = mat_mul(&qr.r, &qr.q).expect("square factors");
    next.shift_diagonal(gamma);
    next
}

#[derive(Clone, Debug)]
pub struct QrStepResult {
    pub t_next: ComplexMatrix,
    pub q_step: ComplexMatrix,
    pub shift_used: Complex64,
    /// Largest magnitude outside the profile after the step.
    pub profile_violation: f64,
    pub shift_perturbed: bool,
}

/// Rejects inputs that are not CMV-like for `profile` within `100·n·u·‖t‖_F`.
fn require_cmv_like(t: &ComplexMatrix, profile: &CmvProfile) -> Result<()> {
    let n = t.require_square()?;
    if profile.n != n {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {n}x{n}, profile is for {}",
            profile.n
        )));
    }
    let threshold = 100.0 * n as f64 * UNIT_ROUNDOFF * t.frobenius_norm();
    let check = verify_cmv_like(t, profile, threshold);
    for v in check.violations {
        match v {
            Violation::OffProfile {
                row,
                col,
                magnitude,
            } => {
                return Err(Error::ProfileViolation {
                    row,
                    col,
                    magnitude,
                    threshold,
                })
            }
            Violation::CouplingRank {
                block_row,
                block_col,
                sigma2,
            } => {
                return Err(Error::CouplingRank {
                    block_row,
                    block_col,
                    sigma2,
                    threshold,
                })
            }
            Violation::NotUnitary { residual, .. } => {
                let tolerance = 100.0 * n as f64 * UNIT_ROUNDOFF;
                if residual > tolerance {
                    return Err(Error::NotUnitary {
                        residual,
                        tolerance,
                    });
                }
            }
            Violation::DimensionMismatch { matrix, profile } => {
                return Err(Error::DimensionMismatch(format!(
                    "matrix {matrix}, profile {profile}"
                )))
            }
        }
    }
    Ok(())
}

/// One shifted QR step on the whole matrix.
pub fn qr_step(
    t: &ComplexMatrix,
    profile: &CmvProfile,
    shift: ShiftStrategy,
) -> Result<QrStepResult> {
    require_cmv_like(t, profile)?;
    let gamma = shift.shift(t);
    let (qr, shift_used, shift_perturbed) = shifted_qr(t, gamma, t.frobenius_norm());
    let t_next = recombine(&qr, shift_used);
    let profile_violation = profile.max_off_profile(&t_next).0;
    Ok(QrStepResult {
        t_next,
        q_step: qr.q,
        shift_used,
        profile_violation,
        shift_perturbed,
    })
}

/// Independent diagonal segments left after zeroing negligible couplings.
#[derive(Clone, Debug, PartialEq)]
pub struct Deflation {
    pub segments: Vec<std::ops::Range<usize>>,
    pub profile: CmvProfile,
}

/// Zeroes every coupling block pair whose larger spectral norm is at most `threshold`
/// and splits the profile there.
pub fn deflate(t: &mut ComplexMatrix, profile: &CmvProfile, threshold: f64) -> Deflation {
    let mut starts = profile.segment_starts.clone();
    for (hi, lo) in profile.coupled_block_pairs() {
        let (rh, rl) = (profile.block_range(hi), profile.block_range(lo));
        let sub = t.submatrix(rh.clone(), rl.clone());
        let sup = t.submatrix(rl.clone(), rh.clone());
        let norm =
            crate::linalg::small_spectral_norm(&sub).max(crate::linalg::small_spectral_norm(&sup));
        if norm <= threshold {
            t.fill_block(rh.clone(), rl.clone(), ZERO);
            t.fill_block(rl, rh.clone(), ZERO);
            starts.push(rh.start);
        }
    }
    let split = CmvProfile::new(profile.block_sizes.clone(), &starts, profile.shape);
    Deflation {
        segments: split.segments(),
        profile: split,
    }
}

/// Matrix iterated by the windowed driver.
pub(crate) trait IterationState {
    fn matrix(&self) -> &ComplexMatrix;
    /// Applies the similarity by `q` embedded on `lo..lo+k`; `block` is the new window.
    fn apply(&mut self, lo: usize, q: &ComplexMatrix, block: ComplexMatrix);
}

/// Similarity on a dense iterate: window replaced, rows above and columns to the right
/// updated.
pub(crate) fn apply_window(
    h: &mut ComplexMatrix,
    lo: usize,
    q: &ComplexMatrix,
    block: ComplexMatrix,
) {
    let n = h.rows();
    let hi = lo + q.rows();
    if lo > 0 {
        let above = h.submatrix(0..lo, lo..hi);
        h.set_submatrix(0, lo, &mat_mul(&above, q).expect("conformant"));
    }
    if hi < n {
        let right = h.submatrix(lo..hi, hi..n);
        h.set_submatrix(lo, hi, &adjoint_mul(q, &right).expect("conformant"));
    }
    h.set_submatrix(lo, lo, &block);
}

struct Dense(ComplexMatrix);

impl IterationState for Dense {
    fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    fn apply(&mut self, lo: usize, q: &ComplexMatrix, block: ComplexMatrix) {
        apply_window(&mut self.0, lo, q, block);
    }
}

/// Outcome of the windowed iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenResult {
    /// One value per row; for an unconverged run the unfinished windows contribute their
    /// diagonal entries.
    pub eigenvalues: Vec<Complex64>,
    pub converged: bool,
    pub steps_total: usize,
    pub deflations: Vec<DeflationEvent>,
    /// Largest off-profile magnitude met inside an active window after any step.
    pub max_profile_violation: f64,
}

impl EigenResult {
    pub fn to_json(&self) -> IterationReportJson {
        IterationReportJson {
            steps_total: self.steps_total,
            deflations: self.deflations.clone(),
            max_profile_violation: self.max_profile_violation,
            eigenvalues: self
                .eigenvalues
                .iter()
                .map(|&z| ComplexJson::from(z))
                .collect(),
            converged: self.converged,
        }
    }
}

/// Frobenius norm of the lower-left coupling across the split `p` inside `lo..hi`,
/// restricted to the band below the diagonal where the iterates can be nonzero.
fn lower_coupling(h: &ComplexMatrix, lo: usize, hi: usize, p: usize) -> f64 {
    let mut s = 0.0;
    for j in p.saturating_sub(3).max(lo)..p {
        for i in p..(j + 4).min(hi) {
            s += h[(i, j)].norm_sqr();
        }
    }
    s.sqrt()
}

pub(crate) fn run_windowed(
    state: &mut impl IterationState,
    profile: Option<&CmvProfile>,
    shift: ShiftStrategy,
    max_steps: usize,
    tolerance: f64,
) -> EigenResult {
    let n = state.matrix().rows();
    let mut eig = vec![ZERO; n];
    let mut stack = vec![(0usize, n)];
    let mut steps = 0;
    let mut deflations = Vec::new();
    let mut max_violation: f64 = 0.0;
    let mut converged = true;

    'windows: while let Some((mut lo, hi)) = stack.pop() {
        let mut quiet = 0;
        loop {
            let h = state.matrix();
            match hi - lo {
                0 => break,
                1 => {
                    eig[lo] = h[(lo, lo)];
                    break;
                }
                _ => {}
            }
            if let Some(p) = (lo + 1..hi)
                .rev()
                .find(|&p| lower_coupling(h, lo, hi, p) <= tolerance)
            {
                deflations.push(DeflationEvent {
                    index: p,
                    step: steps,
                });
                stack.push((lo, p));
                lo = p;
                quiet = 0;
                continue;
            }
            if hi - lo == 2 {
                let [a, b] = eig2(
                    h[(lo, lo)],
                    h[(lo, lo + 1)],
                    h[(lo + 1, lo)],
                    h[(lo + 1, lo + 1)],
                );
                eig[lo] = a;
                eig[lo + 1] = b;
                break;
            }
            if steps >= max_steps {
                converged = false;
                for i in lo..hi {
                    eig[i] = h[(i, i)];
                }
                for (a, b) in stack.drain(..) {
                    for (i, e) in eig.iter_mut().enumerate().take(b).skip(a) {
                        *e = state.matrix()[(i, i)];
                    }
                }
                break 'windows;
            }
            let window = h.submatrix(lo..hi, lo..hi);
            let gamma = if quiet > 0 && quiet % EXCEPTIONAL_PERIOD == 0 {
                let d = window[(hi - lo - 1, hi - lo - 1)];
                let sub = window[(hi - lo - 1, hi - lo - 2)].norm().max(tolerance);
                d + Complex64::from_polar(0.75 * sub, steps as f64)
            } else {
                shift.shift(&window)
            };
            let (qr, used, _) = shifted_qr(&window, gamma, window.frobenius_norm());
            let block = recombine(&qr, used);
            state.apply(lo, &qr.q, block);
            steps += 1;
            quiet += 1;
            if let Some(p) = profile {
                let h = state.matrix();
                for j in lo..hi {
                    for i in lo..hi {
                        if !p.allowed(i, j) {
                            max_violation = max_violation.max(h[(i, j)].norm());
                        }
                    }
                }
            }
        }
    }
    EigenResult {
        eigenvalues: eig,
        converged,
        steps_total: steps,
        deflations,
        max_profile_violation: max_violation,
    }
}

/// Eigenvalues of a unitary CMV-like matrix by windowed shifted QR steps with
/// deflation at `n·u·‖t‖_F`. Exceeding `max_steps` yields a result with
/// `converged == false`.
pub fn eigensolve_unitary(
    t: &ComplexMatrix,
    profile: &CmvProfile,
    shift: ShiftStrategy,
    max_steps: usize,
) -> Result<EigenResult> {
    let n = t.require_square()?;
    if profile.n != n {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {n}x{n}, profile is for {}",
            profile.n
        )));
    }
    let residual = unitarity_residual(t)?;
    let tolerance = 100.0 * n as f64 * UNIT_ROUNDOFF;
    if residual > tolerance {
        return Err(Error::NotUnitary {
            residual,
            tolerance,
        });
    }
    let threshold = n as f64 * UNIT_ROUNDOFF * t.frobenius_norm();
    let mut state = Dense(t.clone());
    Ok(run_windowed(
        &mut state,
        Some(profile),
        shift,
        max_steps,
        threshold,
    ))
}

/// Structure measurements on `B₁ = RQ + γI` after a perturbed step.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerturbedStructureReport {
    pub shift_used: ComplexJson,
    pub shift_perturbed: bool,
    /// Largest entry below the block subdiagonal, relative to `‖B₁‖_F`.
    pub block_hessenberg_violation: f64,
    /// Largest entry outside the compressed lower pattern, relative to `‖B₁‖_F`.
    pub compressed_lower_violation: f64,
    /// Largest `σ₂/σ₁` over the subdiagonal blocks.
    pub max_subdiagonal_ratio: f64,
    /// Upper bound for `σ₃/σ₁` of the first two rows beyond column four.
    pub upper_rank_ratio: f64,
    /// Upper bounds for `σ₃/σ₁` of `B₁(0..2k, 2k+1..n)`, one per `k ≥ 2` with at least
    /// three columns.
    pub aggregate_rank_ratios: Vec<(usize, f64)>,
    /// `‖B₁ − (T₁ + x₁v₁ᴴ)‖_F / ‖B₁‖_F`.
    pub split_fidelity: f64,
}

/// Upper bound for `σ₃(m)/σ₁(m)`: after removing two column-pivoted Gram–Schmidt
/// directions, the Frobenius norm of what is left bounds `σ₃` and the largest column
/// norm bounds `σ₁` from below.
pub fn rank_two_certificate(m: &ComplexMatrix) -> f64 {
    if m.rows() <= 2 || m.cols() <= 2 {
        return 0.0;
    }
    let widest = (0..m.cols()).map(|j| m.col_norm(j)).fold(0.0, f64::max);
    if widest == 0.0 {
        return 0.0;
    }
    let mut r = m.clone();
    for _ in 0..2 {
        let (p, norm) = (0..r.cols())
            .map(|j| (j, r.col_norm(j)))
            .fold((0, 0.0), |best, c| if c.1 > best.1 { c } else { best });
        if norm == 0.0 {
            break;
        }
        let q = r
            .submatrix(0..r.rows(), p..p + 1)
            .scale(Complex64::new(1.0 / norm, 0.0));
        for _ in 0..2 {
            let coeffs = adjoint_mul(&q, &r).expect("same rows");
            r = r
                .sub(&mat_mul(&q, &coeffs).expect("conformant"))
                .expect("same shape");
        }
    }
    r.frobenius_norm() / widest
}

fn perturbed_report(
    b1: &ComplexMatrix,
    next: &PerturbedCmvForm,
    shift_used: Complex64,
    shift_perturbed: bool,
) -> PerturbedStructureReport {
    let n = b1.rows();
    let scale = b1.frobenius_norm().max(f64::MIN_POSITIVE);
    let hess = next.profile.with_shape(ProfileShape::BlockTridiagonal);
    let compressed = next.profile.with_shape(ProfileShape::Compressed);
    let mut block_hessenberg_violation: f64 = 0.0;
    let mut compressed_lower_violation: f64 = 0.0;
    for j in 0..n {
        for i in j + 1..n {
            let a = b1[(i, j)].norm() / scale;
            if !hess.allowed(i, j) {
                block_hessenberg_violation = block_hessenberg_violation.max(a);
            }
            if !compressed.allowed(i, j) {
                compressed_lower_violation = compressed_lower_violation.max(a);
            }
        }
    }
    let max_subdiagonal_ratio = hess
        .coupled_block_pairs()
        .into_iter()
        .map(|(hi, lo)| {
            let d = numerical_rank_2x2(
                &b1.submatrix(hess.block_range(hi), hess.block_range(lo)),
                0.0,
            );
            if d.sigma1() == 0.0 {
                0.0
            } else {
                d.sigma2() / d.sigma1()
            }
        })
        .fold(0.0, f64::max);
    // a slice made of rounding noise has no meaningful rank
    let floor = 100.0 * n as f64 * UNIT_ROUNDOFF * scale;
    let certify = |m: ComplexMatrix| {
        if m.frobenius_norm() <= floor {
            0.0
        } else {
            rank_two_certificate(&m)
        }
    };
    let upper_rank_ratio = if n > 4 {
        certify(b1.submatrix(0..2, 4..n))
    } else {
        0.0
    };
    let aggregate_rank_ratios = (2..)
        .take_while(|k| 2 * k + 4 <= n)
        .map(|k| (k, certify(b1.submatrix(0..2 * k, 2 * k + 1..n))))
        .collect();
    let split_fidelity = b1
        .sub(&next.assemble())
        .expect("same shape")
        .frobenius_norm()
        / scale;
    PerturbedStructureReport {
        shift_used: shift_used.into(),
        shift_perturbed,
        block_hessenberg_violation,
        compressed_lower_violation,
        max_subdiagonal_ratio,
        upper_rank_ratio,
        aggregate_rank_ratios,
        split_fidelity,
    }
}

/// One shifted QR step on `B = T + x·vᴴ`. The new iterate is `RQ + γI`; the unitary part
/// and the correction are carried along as `QᴴTQ`, `Qᴴx` and `Qᴴv`.
pub fn qr_step_perturbed(
    b: &PerturbedCmvForm,
    shift: ShiftStrategy,
) -> Result<(PerturbedCmvForm, PerturbedStructureReport)> {
    let n = b.b.require_square()?;
    if b.t.rows() != n || b.x.rows() != n || b.v.rows() != n || b.profile.n != n {
        return Err(Error::DimensionMismatch(
            "inconsistent perturbed form".into(),
        ));
    }
    let gamma = shift.shift(&b.b);
    let (qr, used, perturbed) = shifted_qr(&b.b, gamma, b.b.frobenius_norm());
    let b1 = recombine(&qr, used);
    let mut next = b.clone();
    next.apply(0, &qr.q, b1.clone());
    let report = perturbed_report(&b1, &next, used, perturbed);
    Ok((next, report))
}
