//! Test matrices: Fourier, cyclic shift, Haar-random unitaries, companion matrices and
//! direct sums, addressed by short spec strings such as `fourier:32` or `haar:16`.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{qr_tall, ComplexMatrix, QrMode, ONE};
use crate::rng::SeededRng;
use crate::rootfind::MonicPolynomial;

/// Normalised Fourier matrix with entries `ω^{jk}/√n`, `ω = exp(−2πi/n)`.
pub fn fourier(n: usize) -> ComplexMatrix {
    let scale = 1.0 / (n as f64).sqrt();
    ComplexMatrix::from_fn(n, n, |j, k| {
        let e = (j * k) % n;
        Complex64::from_polar(scale, -TAU * e as f64 / n as f64)
    })
}

/// Cyclic down-shift: ones on the subdiagonal and in position `(0, n−1)`. This is the
/// companion matrix of `zⁿ − 1`.
pub fn circulant_generator(n: usize) -> ComplexMatrix {
    let mut u = ComplexMatrix::zeros(n, n);
    for i in 1..n {
        u[(i, i - 1)] = ONE;
    }
    if n > 0 {
        u[(0, n - 1)] = ONE;
    }
    u
}

/// Haar-distributed unitary: QR of a seeded complex Gaussian matrix with real positive
/// `diag(R)`.
pub fn haar_unitary(n: usize, seed: u64) -> ComplexMatrix {
    let g = SeededRng::new(seed).gaussian_matrix(n, n);
    qr_tall(&g, QrMode::Thin).q
}

/// Seeded polynomial of degree `n` whose roots are drawn uniformly from the unit disk.
pub fn random_unit_disk_polynomial(n: usize, seed: u64) -> (MonicPolynomial, Vec<Complex64>) {
    let mut rng = SeededRng::new(seed);
    let roots: Vec<Complex64> = (0..n).map(|_| rng.point_in_unit_disk()).collect();
    (MonicPolynomial::from_roots(&roots), roots)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    Fourier,
    Circulant,
    Haar,
    Companion,
    /// Direct sum of Haar-random blocks of the given orders.
    DirectSum(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub n: usize,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn generate(&self) -> Result<ComplexMatrix> {
        let n = self.n;
        match &self.kind {
            GeneratorKind::Fourier => Ok(fourier(n)),
            GeneratorKind::Circulant => Ok(circulant_generator(n)),
            GeneratorKind::Haar => Ok(haar_unitary(n, self.seed)),
            GeneratorKind::Companion => {
                let (p, _) = random_unit_disk_polynomial(n, self.seed);
                Ok(p.companion())
            }
            GeneratorKind::DirectSum(sizes) => {
                let mut u = ComplexMatrix::zeros(n, n);
                let mut at = 0;
                for (k, &size) in sizes.iter().enumerate() {
                    u.set_submatrix(
                        at,
                        at,
                        &haar_unitary(size, self.seed.wrapping_add(k as u64)),
                    );
                    at += size;
                }
                Ok(u)
            }
        }
    }
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    /// `fourier:N`, `circulant:N`, `haar:N`, `companion:N` or `direct:A,B,...`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::InvalidSpec(format!("{s}: {why}"));
        let (name, arg) = s.split_once(':').ok_or_else(|| bad("expected kind:size"))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| bad("size is not a count"))
        };
        let (kind, n) = match name.trim() {
            "fourier" => (GeneratorKind::Fourier, parse(arg)?),
            "circulant" => (GeneratorKind::Circulant, parse(arg)?),
            "haar" => (GeneratorKind::Haar, parse(arg)?),
            "companion" => (GeneratorKind::Companion, parse(arg)?),
            "direct" => {
                let sizes = arg.split(',').map(parse).collect::<Result<Vec<_>>>()?;
                if sizes.contains(&0) {
                    return Err(bad("empty block"));
                }
                let n = sizes.iter().sum();
                (GeneratorKind::DirectSum(sizes), n)
            }
            other => return Err(bad(&format!("unknown generator {other:?}"))),
        };
        let min = match kind {
            GeneratorKind::Fourier | GeneratorKind::Companion => 2,
            _ => 1,
        };
        if n < min {
            return Err(bad(&format!("size must be at least {min}")));
        }
        Ok(Self {
            kind,
            n,
            seed: crate::rng::DEFAULT_SEED,
        })
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            GeneratorKind::Fourier => write!(f, "fourier:{}", self.n),
            GeneratorKind::Circulant => write!(f, "circulant:{}", self.n),
            GeneratorKind::Haar => write!(f, "haar:{}", self.n),
            GeneratorKind::Companion => write!(f, "companion:{}", self.n),
            GeneratorKind::DirectSum(sizes) => {
                let parts: Vec<String> = sizes.iter().map(|s| s.to_string()).collect();
                write!(f, "direct:{}", parts.join(","))
            }
        }
    }
}
