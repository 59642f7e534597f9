//! Seeded pseudorandom source used for starting vectors and test matrices.
//!
//! Backed by xoshiro256++ so that a given seed produces the same stream on every
//! platform.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::linalg::ComplexMatrix;

pub const DEFAULT_SEED: u64 = 1;

#[derive(Clone, Debug)]
pub struct SeededRng(Xoshiro256PlusPlus);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self(Xoshiro256PlusPlus::seed_from_u64(seed))
    }

    pub fn uniform(&mut self) -> f64 {
        self.0.random::<f64>()
    }

    pub fn gaussian(&mut self) -> Complex64 {
        let re: f64 = self.0.sample(StandardNormal);
        let im: f64 = self.0.sample(StandardNormal);
        Complex64::new(re, im)
    }

    pub fn gaussian_matrix(&mut self, rows: usize, cols: usize) -> ComplexMatrix {
        // column-major fill order keeps streams stable if shapes are reinterpreted
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            data.push(self.gaussian());
        }
        ComplexMatrix::from_col_major(rows, cols, data).expect("gaussian samples are finite")
    }

    /// Unit-norm complex Gaussian vector of length `n`.
    pub fn unit_vector(&mut self, n: usize) -> ComplexMatrix {
        let v = self.gaussian_matrix(n, 1);
        let nrm = v.frobenius_norm();
        v.scale(Complex64::new(1.0 / nrm, 0.0))
    }

    /// Unit vector of length `n` supported on `start..n`.
    pub fn unit_vector_on_tail(&mut self, n: usize, start: usize) -> ComplexMatrix {
        let tail = self.unit_vector(n - start);
        let mut v = ComplexMatrix::zeros(n, 1);
        v.set_submatrix(start, 0, &tail);
        v
    }

    /// Point drawn uniformly from the closed unit disk.
    pub fn point_in_unit_disk(&mut self) -> Complex64 {
        let r = self.uniform().sqrt();
        let theta = std::f64::consts::TAU * self.uniform();
        Complex64::from_polar(r, theta)
    }
}
