use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ONE, ZERO};

/// Plane rotation acting on coordinates `i` and `j`:
///
/// ```text
/// [ x_i ]    [  c   s ] [ x_i ]
/// [ x_j ] <- [ -s̄   c ] [ x_j ]
/// ```
///
/// with `c` real and `c² + |s|² = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GivensRotation {
    pub c: f64,
    pub s: Complex64,
    pub i: usize,
    pub j: usize,
}

impl GivensRotation {
    pub fn identity(i: usize, j: usize) -> Self {
        assert_ne!(i, j, "rotation planes need distinct indices");
        Self {
            c: 1.0,
            s: ZERO,
            i,
            j,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.c == 1.0 && self.s == ZERO
    }

    /// Rotation angle, `atan2(|s|, c)`.
    pub fn angle(&self) -> f64 {
        self.s.norm().atan2(self.c)
    }

    pub fn adjoint(&self) -> Self {
        Self {
            c: self.c,
            s: -self.s,
            i: self.i,
            j: self.j,
        }
    }

    /// The 2x2 matrix `[[c, s], [-s̄, c]]`.
    pub fn as_matrix(&self) -> ComplexMatrix {
        let c = Complex64::new(self.c, 0.0);
        ComplexMatrix::from_rows(&[vec![c, self.s], vec![-self.s.conj(), c]])
    }

    /// Applies the rotation to rows `i`, `j` of `m` (left multiplication by the embedded rotation).
    pub fn apply_left(&self, m: &mut ComplexMatrix) {
        for col in 0..m.cols() {
            let x = m[(self.i, col)];
            let y = m[(self.j, col)];
            m[(self.i, col)] = x * self.c + self.s * y;
            m[(self.j, col)] = -self.s.conj() * x + y * self.c;
        }
    }

    /// Right multiplication `m ← m·G` on columns `i`, `j`.
    pub fn apply_right(&self, m: &mut ComplexMatrix) {
        for row in 0..m.rows() {
            let x = m[(row, self.i)];
            let y = m[(row, self.j)];
            m[(row, self.i)] = x * self.c - y * self.s.conj();
            m[(row, self.j)] = x * self.s + y * self.c;
        }
    }

    /// Similarity `m ← Gᴴ·m·G` where `G` is the embedded rotation.
    pub fn apply_similarity(&self, m: &mut ComplexMatrix) {
        self.adjoint().apply_left(m);
        self.apply_right(m);
    }
}

/// Rotation mapping `(a, b)ᵀ` to `(r, 0)ᵀ` with `|r| = √(|a|² + |b|²)`.
///
/// `a = b = 0` gives the identity; `a = 0` gives the swap `c = 0, s = 1`.
pub fn givens_from_pair(a: Complex64, b: Complex64, i: usize, j: usize) -> GivensRotation {
    if b == ZERO {
        return GivensRotation::identity(i, j);
    }
    if a == ZERO {
        return GivensRotation {
            c: 0.0,
            s: ONE,
            i,
            j,
        };
    }
    let abs_a = a.norm();
    let rho = abs_a.hypot(b.norm());
    let phase = a / abs_a;
    GivensRotation {
        c: abs_a / rho,
        s: phase * b.conj() / rho,
        i,
        j,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::UNIT_ROUNDOFF;
    use crate::rng::SeededRng;

    fn apply_pair(g: &GivensRotation, a: Complex64, b: Complex64) -> (Complex64, Complex64) {
        let mut m = ComplexMatrix::column_vector(&[a, b]);
        let g = GivensRotation { i: 0, j: 1, ..*g };
        g.apply_left(&mut m);
        (m[(0, 0)], m[(1, 0)])
    }

    #[test]
    fn trivial_pairs() {
        let g = givens_from_pair(ONE, ZERO, 0, 1);
        assert_eq!((g.c, g.s), (1.0, ZERO));

        let g = givens_from_pair(ZERO, ONE, 0, 1);
        assert_eq!((g.c, g.s), (0.0, ONE));
        let (r, z) = apply_pair(&g, ZERO, ONE);
        assert_eq!(z, ZERO);
        assert_eq!(r.norm(), 1.0);
    }

    #[test]
    fn three_four_five() {
        let a = Complex64::new(3.0, 0.0);
        let b = Complex64::new(4.0, 0.0);
        let g = givens_from_pair(a, b, 0, 1);
        let (r, z) = apply_pair(&g, a, b);
        assert!((r.norm() - 5.0).abs() <= 4.0 * UNIT_ROUNDOFF * 5.0);
        assert!(z.norm() <= 4.0 * UNIT_ROUNDOFF * 5.0);
    }

    #[test]
    fn random_pairs_annihilate_and_stay_unitary() {
        let mut rng = SeededRng::new(42);
        for _ in 0..200 {
            let a = rng.gaussian();
            let b = rng.gaussian();
            let g = givens_from_pair(a, b, 0, 1);
            assert!((g.c * g.c + g.s.norm_sqr() - 1.0).abs() <= 4.0 * UNIT_ROUNDOFF);
            let (r, z) = apply_pair(&g, a, b);
            let rho = a.norm().hypot(b.norm());
            assert!(z.norm() <= 4.0 * UNIT_ROUNDOFF * rho);
            assert!((r.norm() - rho).abs() <= 4.0 * UNIT_ROUNDOFF * rho);
        }
    }

    #[test]
    fn similarity_matches_dense_product() {
        let mut rng = SeededRng::new(8);
        let m = rng.gaussian_matrix(4, 4);
        let g = givens_from_pair(rng.gaussian(), rng.gaussian(), 1, 3);
        let mut dense = ComplexMatrix::identity(4);
        let gm = g.as_matrix();
        dense[(1, 1)] = gm[(0, 0)];
        dense[(1, 3)] = gm[(0, 1)];
        dense[(3, 1)] = gm[(1, 0)];
        dense[(3, 3)] = gm[(1, 1)];
        let expect = crate::linalg::congruence(&dense.adjoint(), &m).unwrap();
        let mut got = m.clone();
        g.adjoint().apply_similarity(&mut got);
        assert!(got.sub(&expect).unwrap().max_abs() < 1e-14);
    }
}
