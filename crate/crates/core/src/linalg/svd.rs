//! Singular value decompositions for matrices with at most two columns.
//!
//! Every call site in this crate works on `n x 2` slices or `2 x 2` blocks, so a thin QR
//! followed by a closed-form one-sided Jacobi rotation of the triangular factor is enough.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::{mat_mul, ComplexMatrix, ONE, UNIT_ROUNDOFF, ZERO};
use super::qr::{qr_tall, QrMode};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankDecision {
    pub numerical_rank: usize,
    /// Descending, nonnegative.
    pub singular_values: Vec<f64>,
    pub threshold: f64,
}

impl RankDecision {
    fn new(singular_values: Vec<f64>, threshold: f64) -> Self {
        let numerical_rank = singular_values.iter().filter(|&&s| s > threshold).count();
        Self {
            numerical_rank,
            singular_values,
            threshold,
        }
    }

    /// Second singular value, zero when there is none.
    pub fn sigma2(&self) -> f64 {
        self.singular_values.get(1).copied().unwrap_or(0.0)
    }

    pub fn sigma1(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }
}

/// `w = g·diag(σ)·vᴴ` with `g` having orthonormal columns.
#[derive(Clone, Debug)]
pub struct TwoColumnSvd {
    pub g: ComplexMatrix,
    pub decision: RankDecision,
    pub v: ComplexMatrix,
}

/// SVD of a matrix with one or two columns.
///
/// `scale`, when given, is the absolute rank threshold; otherwise singular values are
/// significant when they exceed `max(rows, cols)·u·σ₁`.
pub fn svd_two_cols(w: &ComplexMatrix, scale: Option<f64>) -> TwoColumnSvd {
    let (m, k) = (w.rows(), w.cols());
    assert!(
        (1..=2).contains(&k),
        "svd_two_cols handles one or two columns"
    );
    assert!(m >= k, "svd_two_cols needs rows >= cols");
    let threshold_for = |sigma1: f64| scale.unwrap_or(m.max(k) as f64 * UNIT_ROUNDOFF * sigma1);

    if k == 1 {
        let sigma = w.frobenius_norm();
        let g = if sigma > 0.0 {
            w.scale(Complex64::new(1.0 / sigma, 0.0))
        } else {
            ComplexMatrix::unit_vector(m, 0)
        };
        return TwoColumnSvd {
            g,
            decision: RankDecision::new(vec![sigma], threshold_for(sigma)),
            v: ComplexMatrix::identity(1),
        };
    }

    let qr = qr_tall(w, QrMode::Thin);
    let (u2, sigma, v) = svd_upper_2x2(&qr.r);
    let g = mat_mul(&qr.q, &u2).expect("thin factor is m x 2");
    TwoColumnSvd {
        g,
        decision: RankDecision::new(sigma.to_vec(), threshold_for(sigma[0])),
        v,
    }
}

/// Closed-form SVD of a 2x2 matrix: returns `(U, σ, V)` with `r = U·diag(σ)·Vᴴ`.
fn svd_upper_2x2(r: &ComplexMatrix) -> (ComplexMatrix, [f64; 2], ComplexMatrix) {
    let a = r.col_norm(0).powi(2);
    let b = r.col_norm(1).powi(2);
    let c = r.col_dot(0, 1);

    // Jacobi rotation J diagonalising the Gram matrix [[a, c], [c̄, b]].
    let mut j = ComplexMatrix::identity(2);
    if c != ZERO {
        let abs_c = c.norm();
        let phase = c.conj() / abs_c;
        let zeta = (b - a) / (2.0 * abs_c);
        let t = if zeta == 0.0 {
            1.0
        } else {
            zeta.signum() / (zeta.abs() + zeta.hypot(1.0))
        };
        let cs = 1.0 / t.hypot(1.0);
        let sn = cs * t;
        j[(0, 0)] = Complex64::new(cs, 0.0);
        j[(0, 1)] = Complex64::new(sn, 0.0);
        j[(1, 0)] = phase * (-sn);
        j[(1, 1)] = phase * cs;
    }
    let mut rj = mat_mul(r, &j).expect("2x2");
    let mut sigma = [rj.col_norm(0), rj.col_norm(1)];
    if sigma[1] > sigma[0] {
        for i in 0..2 {
            let (x, y) = (rj[(i, 0)], rj[(i, 1)]);
            rj[(i, 0)] = y;
            rj[(i, 1)] = x;
            let (x, y) = (j[(i, 0)], j[(i, 1)]);
            j[(i, 0)] = y;
            j[(i, 1)] = x;
        }
        sigma.swap(0, 1);
    }

    let mut u = ComplexMatrix::zeros(2, 2);
    if sigma[0] > 0.0 {
        u[(0, 0)] = rj[(0, 0)] / sigma[0];
        u[(1, 0)] = rj[(1, 0)] / sigma[0];
    } else {
        u[(0, 0)] = ONE;
    }
    // The second left vector is the orthogonal complement of the first; its phase is
    // taken from the rotated column so that σ₂ stays real and nonnegative.
    let comp = [-u[(1, 0)].conj(), u[(0, 0)].conj()];
    let proj = comp[0].conj() * rj[(0, 1)] + comp[1].conj() * rj[(1, 1)];
    let phase = if proj == ZERO {
        ONE
    } else {
        proj / proj.norm()
    };
    u[(0, 1)] = comp[0] * phase;
    u[(1, 1)] = comp[1] * phase;
    (u, sigma, j)
}

/// Singular values and numerical rank of a block with at most two rows or two columns,
/// judged against the absolute threshold `scale`.
pub fn numerical_rank_2x2(b: &ComplexMatrix, scale: f64) -> RankDecision {
    let oriented = if b.rows() < b.cols() {
        b.adjoint()
    } else {
        b.clone()
    };
    if oriented.cols() == 0 {
        return RankDecision::new(Vec::new(), scale);
    }
    let mut d = svd_two_cols(&oriented, Some(scale)).decision;
    d.threshold = scale;
    d
}
