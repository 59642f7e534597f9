//! Reference computations that share no code with the library.

#![allow(dead_code)]

use cmv_core::ComplexMatrix;
use nalgebra::DMatrix;
use num_complex::Complex64;

pub fn to_nalgebra(m: &ComplexMatrix) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

/// Textbook triple loop.
pub fn naive_mul(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.rows(), b.cols(), |i, j| {
        let mut s = Complex64::new(0.0, 0.0);
        for k in 0..a.cols() {
            s += a[(i, k)] * b[(k, j)];
        }
        s
    })
}

/// Eigenvalues from nalgebra's complex Schur form.
pub fn schur_eigenvalues(m: &ComplexMatrix) -> Vec<Complex64> {
    let (_, t) = nalgebra::Schur::new(to_nalgebra(m)).unpack();
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

/// Characteristic polynomial `det(zI − A)` by Faddeev–LeVerrier, leading coefficient first.
pub fn char_poly(a: &ComplexMatrix) -> Vec<Complex64> {
    let n = a.rows();
    let a = to_nalgebra(a);
    let id = DMatrix::<Complex64>::identity(n, n);
    let mut c = vec![Complex64::new(1.0, 0.0)];
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for k in 1..=n {
        m = &a * &m + &id * c[k - 1];
        let ck = -(&a * &m).trace() / k as f64;
        c.push(ck);
    }
    c
}

/// All roots of a polynomial (leading coefficient first) by Durand–Kerner iteration.
pub fn durand_kerner(coeffs: &[Complex64]) -> Vec<Complex64> {
    let lead = coeffs[0];
    let p: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let n = p.len() - 1;
    let eval = |z: Complex64| {
        p.iter()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    };
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32)).collect();
    for _ in 0..2000 {
        let mut delta: f64 = 0.0;
        for i in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            let step = eval(z[i]) / den;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    // polish each root with Newton steps on the original polynomial
    for r in z.iter_mut() {
        for _ in 0..3 {
            let (mut v, mut d) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
            for &c in &p {
                d = d * *r + v;
                v = v * *r + c;
            }
            if d.norm() > 0.0 {
                *r -= v / d;
            }
        }
    }
    z
}

/// Minimum-cost assignment (Hungarian method) on a square cost matrix; returns the
/// column assigned to each row.
pub fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    let inf = f64::INFINITY;
    let (mut u, mut v) = (vec![0.0; n + 1], vec![0.0; n + 1]);
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0; n];
    for j in 1..=n {
        if p[j] > 0 {
            assign[p[j] - 1] = j - 1;
        }
    }
    assign
}

/// Largest distance under the optimal pairing of two multisets of equal size.
pub fn matching_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len(), "multisets differ in size");
    let cost: Vec<Vec<f64>> = a
        .iter()
        .map(|x| b.iter().map(|y| (x - y).norm()).collect())
        .collect();
    hungarian(&cost)
        .iter()
        .enumerate()
        .map(|(i, &j)| cost[i][j])
        .fold(0.0, f64::max)
}
