use std::ops::{Index, IndexMut, Range};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Unit roundoff of IEEE double precision (half the machine epsilon).
pub const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense complex matrix stored column-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from column-major data, rejecting NaN and infinite entries.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(k) = data
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite {
                row: k % rows.max(1),
                col: k / rows.max(1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from row-major nested rows. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        Self::from_fn(r, c, |i, j| {
            assert_eq!(rows[i].len(), c, "ragged row {i}");
            rows[i][j]
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn column_vector(entries: &[Complex64]) -> Self {
        Self {
            rows: entries.len(),
            cols: 1,
            data: entries.to_vec(),
        }
    }

    /// The `k`-th coordinate vector of length `n`.
    pub fn unit_vector(n: usize, k: usize) -> Self {
        let mut v = Self::zeros(n, 1);
        v[(k, 0)] = ONE;
        v
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn col(&self, j: usize) -> &[Complex64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [Complex64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, alpha: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * alpha).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Adds `alpha` to every diagonal entry.
    pub fn shift_diagonal(&mut self, alpha: Complex64) {
        for i in 0..self.rows.min(self.cols) {
            self[(i, i)] += alpha;
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Copies out the block `rows x cols`.
    pub fn submatrix(&self, rows: Range<usize>, cols: Range<usize>) -> Self {
        let r0 = rows.start;
        let c0 = cols.start;
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(r0 + i, c0 + j)])
    }

    /// Overwrites the block whose top-left corner is `(r0, c0)`.
    pub fn set_submatrix(&mut self, r0: usize, c0: usize, block: &Self) {
        for j in 0..block.cols {
            for i in 0..block.rows {
                self[(r0 + i, c0 + j)] = block[(i, j)];
            }
        }
    }

    pub fn fill_block(&mut self, rows: Range<usize>, cols: Range<usize>, value: Complex64) {
        for j in cols {
            for i in rows.clone() {
                self[(i, j)] = value;
            }
        }
    }

    /// Conjugate inner product of columns `a` and `b`: colᴴ(a)·col(b).
    pub fn col_dot(&self, a: usize, b: usize) -> Complex64 {
        self.col(a)
            .iter()
            .zip(self.col(b))
            .fold(ZERO, |acc, (x, y)| acc + x.conj() * y)
    }

    pub fn col_norm(&self, j: usize) -> f64 {
        self.col(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[j * self.rows + i]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[j * self.rows + i]
    }
}

/// Dense product `a·b`.
///
/// Each output column is accumulated as `Σ_k a(:,k)·b(k,j)` with `k` ascending,
/// so the summation order is fixed and reproducible.
pub fn mat_mul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let mut c = ComplexMatrix::zeros(a.rows, b.cols);
    // rows outside the nonzero span of a column of `a` only ever receive exact zeros
    let spans: Vec<Range<usize>> = (0..a.cols)
        .map(|k| {
            let col = a.col(k);
            match col.iter().position(|z| *z != ZERO) {
                Some(first) => first..col.iter().rposition(|z| *z != ZERO).expect("nonempty") + 1,
                None => 0..0,
            }
        })
        .collect();
    for j in 0..b.cols {
        let out = &mut c.data[j * a.rows..(j + 1) * a.rows];
        for (k, span) in spans.iter().enumerate() {
            let bkj = b[(k, j)];
            if bkj == ZERO || span.is_empty() {
                continue;
            }
            let acol = &a.data[k * a.rows + span.start..k * a.rows + span.end];
            for (o, &x) in out[span.clone()].iter_mut().zip(acol) {
                *o += x * bkj;
            }
        }
    }
    Ok(c)
}

/// `aᴴ·b` without materialising the adjoint.
pub fn adjoint_mul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.rows != b.rows {
        return Err(Error::DimensionMismatch(format!(
            "cannot form adjoint product of {}x{} and {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    Ok(ComplexMatrix::from_fn(a.cols, b.cols, |i, j| {
        a.col(i)
            .iter()
            .zip(b.col(j))
            .fold(ZERO, |acc, (x, y)| acc + x.conj() * y)
    }))
}

/// `qᴴ·m·q`.
pub fn congruence(q: &ComplexMatrix, m: &ComplexMatrix) -> Result<ComplexMatrix> {
    adjoint_mul(q, &mat_mul(m, q)?)
}

/// `(u + uᴴ)/2`. Conjugate pairs are averaged so the result is Hermitian bit for bit.
pub fn hermitian_part(u: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = u.require_square()?;
    let mut h = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        h[(j, j)] = Complex64::new(u[(j, j)].re, 0.0);
        for i in j + 1..n {
            let v = (u[(i, j)] + u[(j, i)].conj()) * 0.5;
            h[(i, j)] = v;
            h[(j, i)] = v.conj();
        }
    }
    Ok(h)
}

/// `(u − uᴴ)/2`, computed as `u − hermitian_part(u)`.
pub fn anti_hermitian_part(u: &ComplexMatrix) -> Result<ComplexMatrix> {
    u.sub(&hermitian_part(u)?)
}

/// `‖qᴴq − I‖_F`.
pub fn unitarity_residual(q: &ComplexMatrix) -> Result<f64> {
    q.require_square()?;
    let mut g = adjoint_mul(q, q)?;
    g.shift_diagonal(-ONE);
    Ok(g.frobenius_norm())
}

/// Spectral norm of a matrix with at most two columns (or two rows).
pub fn small_spectral_norm(b: &ComplexMatrix) -> f64 {
    crate::linalg::numerical_rank_2x2(b, 0.0)
        .singular_values
        .first()
        .copied()
        .unwrap_or(0.0)
}
