use num_complex::Complex64;

use super::profile::{CmvProfile, ProfileShape};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, GivensRotation, ONE};

/// Output of [`compress_to_profile`].
#[derive(Clone, Debug)]
pub struct Compression {
    /// `Zᴴ·t·Z` with off-profile entries set to zero.
    pub t: ComplexMatrix,
    /// Rotations in application order; `Z` is their product from the left.
    pub rotations: Vec<GivensRotation>,
    pub profile: CmvProfile,
    /// Largest off-profile magnitude before zeroing.
    pub max_off_profile: f64,
}

impl Compression {
    /// `q ← q·Z`.
    pub fn apply_to(&self, q: &mut ComplexMatrix) {
        for g in &self.rotations {
            g.apply_right(q);
        }
    }
}

fn larger_row(
    t: &ComplexMatrix,
    rows: std::ops::Range<usize>,
    cols: (usize, usize),
) -> Option<(Complex64, Complex64)> {
    rows.map(|i| (t[(i, cols.0)], t[(i, cols.1)]))
        .max_by(|a, b| {
            (a.0.norm_sqr() + a.1.norm_sqr()).total_cmp(&(b.0.norm_sqr() + b.1.norm_sqr()))
        })
}

fn column_norm(t: &ComplexMatrix, rows: std::ops::Range<usize>, col: usize) -> f64 {
    rows.map(|i| t[(i, col)].norm_sqr()).sum::<f64>().sqrt()
}

/// Rotation on columns `(p, p+1)` with `r0·c − r1·s̄ = 0`, i.e. it clears column `p` of the row.
fn clear_first(r0: Complex64, r1: Complex64, p: usize) -> GivensRotation {
    if r1.norm() == 0.0 {
        return GivensRotation {
            c: 0.0,
            s: ONE,
            i: p,
            j: p + 1,
        };
    }
    let rho = r0.norm().hypot(r1.norm());
    let c = r1.norm() / rho;
    GivensRotation {
        c,
        s: r0.conj() * c / r1.conj(),
        i: p,
        j: p + 1,
    }
}

/// Rotation on columns `(p, p+1)` with `r0·s + r1·c = 0`, i.e. it clears column `p+1`.
fn clear_second(r0: Complex64, r1: Complex64, p: usize) -> GivensRotation {
    if r0.norm() == 0.0 {
        return GivensRotation {
            c: 0.0,
            s: ONE,
            i: p,
            j: p + 1,
        };
    }
    let rho = r0.norm().hypot(r1.norm());
    let c = r0.norm() / rho;
    GivensRotation {
        c,
        s: -r1 * c / r0,
        i: p,
        j: p + 1,
    }
}

/// Compresses every rank-one coupling of a block tridiagonal unitary `t` to the single
/// column allowed by the compressed profile.
///
/// Per segment, a rotation inside the first block clears the first column of the first
/// subdiagonal block; then, block by block, a rotation inside block `b` clears the
/// second column of the superdiagonal block `(b−1, b)`. The remaining subdiagonal zeros
/// follow from unitarity. Entries left outside the profile must not exceed `threshold`,
/// otherwise the rank-one hypothesis failed and the offending index is reported.
pub fn compress_to_profile(
    t: &ComplexMatrix,
    profile: &CmvProfile,
    threshold: f64,
) -> Result<Compression> {
    let n = t.require_square()?;
    if n != profile.n {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {n}x{n}, profile is for {}",
            profile.n
        )));
    }
    let profile = profile.with_shape(ProfileShape::Compressed);
    let mut t = t.clone();
    let mut rotations = Vec::new();
    let mut push = |g: GivensRotation, t: &mut ComplexMatrix| {
        g.apply_similarity(t);
        rotations.push(g);
    };

    for k in 0..profile.segment_starts.len() {
        let blocks = profile.segment_blocks(k);
        if blocks.len() < 2 {
            continue;
        }
        let first = profile.block_range(blocks.start);
        let below = profile.block_range(blocks.start + 1);
        if first.len() == 2 && column_norm(&t, below.clone(), first.start) > threshold {
            let (r0, r1) =
                larger_row(&t, below, (first.start, first.start + 1)).expect("block is not empty");
            push(clear_first(r0, r1, first.start), &mut t);
        }
        for b in blocks.start + 1..blocks.end {
            let cur = profile.block_range(b);
            if cur.len() != 2 {
                continue;
            }
            let above = profile.block_range(b - 1);
            if column_norm(&t, above.clone(), cur.start + 1) > threshold {
                let (r0, r1) =
                    larger_row(&t, above, (cur.start, cur.start + 1)).expect("block is not empty");
                push(clear_second(r0, r1, cur.start), &mut t);
            }
        }
    }

    let (max_off_profile, at) = profile.max_off_profile(&t);
    if max_off_profile > threshold {
        let (row, col) = at.expect("a maximum exists");
        return Err(Error::ProfileViolation {
            row,
            col,
            magnitude: max_off_profile,
            threshold,
        });
    }
    profile.zero_off_profile(&mut t);
    Ok(Compression {
        t,
        rotations,
        profile,
        max_off_profile,
    })
}
