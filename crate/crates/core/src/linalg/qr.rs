use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ZERO};

/// Which orthogonal factor [`qr_tall`] returns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum QrMode {
    /// `q` is `rows x cols`, `r` is `cols x cols`.
    #[default]
    Thin,
    /// `q` is the full `rows x rows` unitary, `r` is `rows x cols`.
    Full,
}

#[derive(Clone, Debug)]
pub struct QrFactors {
    pub q: ComplexMatrix,
    pub r: ComplexMatrix,
}

/// Elementary reflector `I − τ·v·vᴴ` whose vector is supported on `start..start+v.len()`.
#[derive(Clone, Debug)]
pub(crate) struct Householder {
    start: usize,
    v: Vec<Complex64>,
    tau: f64,
}

impl Householder {
    /// Reflector sending `x` to `α·e₁`. Returns `None` when `x` is already a multiple of `e₁`.
    fn annihilating(x: &[Complex64], start: usize) -> Option<(Self, Complex64)> {
        let tail: f64 = x[1..].iter().map(|z| z.norm_sqr()).sum();
        if tail == 0.0 {
            return None;
        }
        let norm = (x[0].norm_sqr() + tail).sqrt();
        let phase = if x[0] == ZERO {
            Complex64::new(1.0, 0.0)
        } else {
            x[0] / x[0].norm()
        };
        let alpha = -phase * norm;
        let mut v = x.to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        Some((
            Self {
                start,
                v,
                tau: 2.0 / vnorm2,
            },
            alpha,
        ))
    }

    /// `m ← H·m` restricted to columns `cols`.
    fn apply_left(&self, m: &mut ComplexMatrix, cols: std::ops::Range<usize>) {
        for j in cols {
            let col = &mut m.col_mut(j)[self.start..self.start + self.v.len()];
            let w = self
                .v
                .iter()
                .zip(col.iter())
                .fold(ZERO, |acc, (v, y)| acc + v.conj() * y)
                * self.tau;
            for (y, v) in col.iter_mut().zip(&self.v) {
                *y -= v * w;
            }
        }
    }
}

/// Householder QR on a working copy; returns the reflectors and the triangular factor
/// with the strictly lower part set to exact zeros. No phase normalisation.
pub(crate) fn householder_qr(a: &ComplexMatrix) -> (Vec<Householder>, ComplexMatrix) {
    let (m, n) = (a.rows(), a.cols());
    let mut r = a.clone();
    let mut reflectors = Vec::with_capacity(n);
    for k in 0..n.min(m) {
        // trailing exact zeros contribute nothing, so the reflector stops at the last nonzero
        let col = &r.col(k)[k..];
        let len = col.iter().rposition(|z| *z != ZERO).map_or(1, |p| p + 1);
        let x = col[..len].to_vec();
        if let Some((h, alpha)) = Householder::annihilating(&x, k) {
            h.apply_left(&mut r, k + 1..n);
            r[(k, k)] = alpha;
            for i in k + 1..m {
                r[(i, k)] = ZERO;
            }
            reflectors.push(h);
        }
    }
    (reflectors, r)
}

/// Forms the first `ncols` columns of `H₀·H₁⋯`.
fn accumulate(reflectors: &[Householder], rows: usize, ncols: usize) -> ComplexMatrix {
    let mut q = ComplexMatrix::from_fn(rows, ncols, |i, j| {
        if i == j {
            Complex64::new(1.0, 0.0)
        } else {
            ZERO
        }
    });
    for h in reflectors.iter().rev() {
        h.apply_left(&mut q, 0..ncols);
    }
    q
}

/// Householder QR of a matrix with `rows ≥ cols`, normalised so that `diag(r)` is real
/// and nonnegative.
pub fn qr_tall(a: &ComplexMatrix, mode: QrMode) -> QrFactors {
    assert!(a.rows() >= a.cols(), "qr_tall needs rows >= cols");
    let (m, n) = (a.rows(), a.cols());
    let (reflectors, r_full) = householder_qr(a);
    let qcols = match mode {
        QrMode::Thin => n,
        QrMode::Full => m,
    };
    let mut q = accumulate(&reflectors, m, qcols);
    let mut r = match mode {
        QrMode::Thin => r_full.submatrix(0..n, 0..n),
        QrMode::Full => r_full,
    };
    for k in 0..n {
        let d = r[(k, k)];
        if d.im == 0.0 && d.re >= 0.0 {
            continue;
        }
        let phase = d / d.norm();
        // r ← diag(phase̅)·r, q ← q·diag(phase)
        for j in k..n {
            r[(k, j)] *= phase.conj();
        }
        r[(k, k)] = Complex64::new(d.norm(), 0.0);
        for i in 0..m {
            q[(i, k)] *= phase;
        }
    }
    QrFactors { q, r }
}

/// Full QR of a square matrix without phase normalisation, as used by the QR iteration.
/// Structural zeros in the lower part of `a` stay exact zeros in `q`.
pub fn qr_square(a: &ComplexMatrix) -> QrFactors {
    assert!(a.is_square());
    let n = a.rows();
    let (reflectors, r) = householder_qr(a);
    QrFactors {
        q: accumulate(&reflectors, n, n),
        r,
    }
}
