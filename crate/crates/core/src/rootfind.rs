//! Polynomial roots as eigenvalues of the companion matrix, split as the cyclic shift plus
//! a rank-one correction in the first row.

use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;

use crate::cmv::{unitary_cmv_reduction, CmvProfile};
use crate::error::{Error, Result};
use crate::generate::circulant_generator;
use crate::linalg::{
    adjoint_mul, congruence, io::parse_complex, mat_mul, ComplexMatrix, UNIT_ROUNDOFF, ZERO,
};
use crate::qriter::{apply_window, run_windowed, IterationState, ShiftStrategy};
use crate::report::ReductionReport;

/// `zⁿ + a_{n−1}zⁿ⁻¹ + … + a₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct MonicPolynomial {
    /// `a₀ … a_{n−1}`.
    coefficients: Vec<Complex64>,
}

impl MonicPolynomial {
    /// From `a₀ … a_{n−1}`; the degree is the length and must be at least one.
    pub fn new(coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::DegreeTooSmall(0));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::Parse("non-finite coefficient".into()));
        }
        Ok(Self { coefficients })
    }

    /// From coefficients listed highest degree first; the first one must be 1.
    pub fn from_high_order(coeffs: &[Complex64]) -> Result<Self> {
        match coeffs.first() {
            Some(&lead) if lead == Complex64::new(1.0, 0.0) => {
                Self::new(coeffs[1..].iter().rev().copied().collect())
            }
            Some(_) => Err(Error::Parse("leading coefficient must be 1".into())),
            None => Err(Error::DegreeTooSmall(0)),
        }
    }

    /// `∏ (z − r)` expanded in the order the roots are given.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        // c holds the low-order coefficients of the partial product, c[k] = 1 implicit
        let mut c: Vec<Complex64> = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![ZERO; c.len() + 1];
            for (j, &cj) in c.iter().enumerate() {
                next[j + 1] += cj;
                next[j] -= r * cj;
            }
            c = next;
        }
        c.pop();
        Self { coefficients: c }
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coefficients
            .iter()
            .rev()
            .fold(Complex64::new(1.0, 0.0), |acc, &a| acc * z + a)
    }

    /// `‖(1, a_{n−1}, …, a₀)‖₁`.
    pub fn coefficient_norm1(&self) -> f64 {
        1.0 + self.coefficients.iter().map(|a| a.norm()).sum::<f64>()
    }

    /// Companion matrix with first row `(−a_{n−1}, …, −a₀)` and ones on the subdiagonal.
    pub fn companion(&self) -> ComplexMatrix {
        let n = self.degree();
        let mut a = ComplexMatrix::zeros(n, n);
        for j in 0..n {
            a[(0, j)] = -self.coefficients[n - 1 - j];
        }
        for i in 1..n {
            a[(i, i - 1)] = Complex64::new(1.0, 0.0);
        }
        a
    }

    /// `p(s·y)/sⁿ` with `s = |a₀|^{1/n}`; roots of the result times `s` are roots of `p`.
    fn balanced(&self) -> (Self, f64) {
        let n = self.degree();
        let a0 = self.coefficients[0].norm();
        if a0 == 0.0 {
            return (self.clone(), 1.0);
        }
        let s = a0.powf(1.0 / n as f64);
        let coefficients = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(k, &a)| a / s.powi((n - k) as i32))
            .collect();
        (Self { coefficients }, s)
    }

    /// `poly <degree>` followed by one `<re> <im>` line per coefficient, `a₀` first.
    pub fn to_text(&self) -> String {
        let mut s = format!("poly {}\n", self.degree());
        for a in &self.coefficients {
            let _ = writeln!(s, "{:e} {:e}", a.re, a.im);
        }
        s
    }
}

impl FromStr for MonicPolynomial {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty polynomial file".into()))?;
        let degree = match header.split_whitespace().collect::<Vec<_>>()[..] {
            ["poly", d] => d
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad degree {d:?}")))?,
            _ => return Err(Error::Parse(format!("bad polynomial header {header:?}"))),
        };
        let coefficients = lines.map(parse_complex).collect::<Result<Vec<_>>>()?;
        if coefficients.len() != degree {
            return Err(Error::Parse(format!(
                "expected {degree} coefficients, found {}",
                coefficients.len()
            )));
        }
        Self::new(coefficients)
    }
}

/// `(U, z, w)` with `U` the cyclic shift, `z = e₁` and `U + z·wᴴ` the companion matrix.
pub fn companion_split(
    p: &MonicPolynomial,
) -> Result<(ComplexMatrix, ComplexMatrix, ComplexMatrix)> {
    let n = p.degree();
    if n < 2 {
        return Err(Error::DegreeTooSmall(n));
    }
    let u = circulant_generator(n);
    let z = ComplexMatrix::unit_vector(n, 0);
    // wᴴ = (−a_{n−1}, …, −a₁, −a₀ − 1)
    let mut w = ComplexMatrix::zeros(n, 1);
    for j in 0..n {
        let mut entry = -p.coefficients[n - 1 - j];
        if j == n - 1 {
            entry -= 1.0;
        }
        w[(j, 0)] = entry.conj();
    }
    Ok((u, z, w))
}

/// `B = T + x·vᴴ` with `T` unitary CMV-like; `b` is the current iterate, equal to the
/// assembled sum up to rounding.
#[derive(Clone, Debug)]
pub struct PerturbedCmvForm {
    pub t: ComplexMatrix,
    pub x: ComplexMatrix,
    pub v: ComplexMatrix,
    pub b: ComplexMatrix,
    pub profile: CmvProfile,
    pub q: ComplexMatrix,
    pub report: ReductionReport,
    /// `‖Qᴴz − βe₁‖` after the reduction.
    pub first_column_leakage: f64,
}

impl PerturbedCmvForm {
    /// `t + x·vᴴ`.
    pub fn assemble(&self) -> ComplexMatrix {
        let xv = mat_mul(&self.x, &self.v.adjoint()).expect("column vectors");
        self.t.add(&xv).expect("same shape")
    }
}

impl IterationState for PerturbedCmvForm {
    fn matrix(&self) -> &ComplexMatrix {
        &self.b
    }

    fn apply(&mut self, lo: usize, q: &ComplexMatrix, block: ComplexMatrix) {
        let n = self.b.rows();
        let hi = lo + q.rows();
        apply_window(&mut self.b, lo, q, block);

        let rows = self.t.submatrix(lo..hi, 0..n);
        self.t
            .set_submatrix(lo, 0, &adjoint_mul(q, &rows).expect("conformant"));
        let cols = self.t.submatrix(0..n, lo..hi);
        self.t
            .set_submatrix(0, lo, &mat_mul(&cols, q).expect("conformant"));
        for vec in [&mut self.x, &mut self.v] {
            let part = vec.submatrix(lo..hi, 0..1);
            vec.set_submatrix(lo, 0, &adjoint_mul(q, &part).expect("conformant"));
        }
        let qcols = self.q.submatrix(0..n, lo..hi);
        self.q
            .set_submatrix(0, lo, &mat_mul(&qcols, q).expect("conformant"));
    }
}

/// Reduces the cyclic part of the companion matrix from `z = e₁`; the correction then
/// lives in the first row only: `QᴴAQ = T + e₁·vᴴ` with `v = β̄·Qᴴw`, `β = (Qᴴz)₀`.
pub fn reduce_companion(p: &MonicPolynomial) -> Result<PerturbedCmvForm> {
    let (u, z, w) = companion_split(p)?;
    let n = p.degree();
    let form = unitary_cmv_reduction(&u, &z)?;
    let qz = adjoint_mul(&form.q, &z)?;
    let beta = qz[(0, 0)];
    let first_column_leakage = qz.submatrix(1..n, 0..1).frobenius_norm();
    let v = adjoint_mul(&form.q, &w)?.scale(beta.conj());
    let x = ComplexMatrix::unit_vector(n, 0);
    let mut b = form.t.clone();
    for j in 0..n {
        b[(0, j)] += v[(j, 0)].conj();
    }
    let a = p.companion();
    let mut report = form.report.clone();
    report.residual = congruence(&form.q, &a)?.sub(&b)?.frobenius_norm();
    Ok(PerturbedCmvForm {
        t: form.t,
        x,
        v,
        b,
        profile: form.profile,
        q: form.q,
        report,
        first_column_leakage,
    })
}

#[derive(Clone, Debug)]
pub struct RootOptions {
    pub shift: ShiftStrategy,
    /// Defaults to `100·degree` steps.
    pub max_steps: Option<usize>,
    /// Scale `z` by `|a₀|^{1/n}` before solving.
    pub balance: bool,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            shift: ShiftStrategy::Wilkinson,
            max_steps: None,
            balance: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RootsResult {
    /// Exactly `degree` values, with multiplicity.
    pub roots: Vec<Complex64>,
    pub converged: bool,
    pub steps: usize,
}

pub fn roots(p: &MonicPolynomial, shift: ShiftStrategy, max_steps: usize) -> Result<RootsResult> {
    roots_with(
        p,
        &RootOptions {
            shift,
            max_steps: Some(max_steps),
            balance: false,
        },
    )
}

pub fn roots_with(p: &MonicPolynomial, options: &RootOptions) -> Result<RootsResult> {
    let n = p.degree();
    if n == 1 {
        return Ok(RootsResult {
            roots: vec![-p.coefficients[0]],
            converged: true,
            steps: 0,
        });
    }
    let (work, scale) = if options.balance {
        p.balanced()
    } else {
        (p.clone(), 1.0)
    };
    let mut form = reduce_companion(&work)?;
    let tolerance = n as f64 * UNIT_ROUNDOFF * form.b.frobenius_norm();
    let max_steps = options.max_steps.unwrap_or(100 * n);
    let result = run_windowed(&mut form, None, options.shift, max_steps, tolerance);
    Ok(RootsResult {
        roots: result.eigenvalues.into_iter().map(|r| r * scale).collect(),
        converged: result.converged,
        steps: result.steps_total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ONE;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn sorted_re(mut r: Vec<Complex64>) -> Vec<Complex64> {
        r.sort_by(|a, b| a.re.total_cmp(&b.re));
        r
    }

    #[test]
    fn expansion_and_evaluation() {
        let p = MonicPolynomial::from_roots(&[re(1.0), re(2.0), re(3.0)]);
        assert_eq!(p.coefficients(), &[re(-6.0), re(11.0), re(-6.0)]);
        assert_eq!(p.eval(re(2.0)), ZERO);
        let q = MonicPolynomial::from_high_order(&[ONE, re(-6.0), re(11.0), re(-6.0)]).unwrap();
        assert_eq!(p, q);
        assert!(MonicPolynomial::from_high_order(&[re(2.0), ONE]).is_err());
    }

    #[test]
    fn split_assembles_the_companion_exactly() {
        let p = MonicPolynomial::new(vec![
            Complex64::new(0.5, -1.0),
            re(2.0),
            Complex64::new(0.0, 3.0),
        ])
        .unwrap();
        let (u, z, w) = companion_split(&p).unwrap();
        let a = u.add(&mat_mul(&z, &w.adjoint()).unwrap()).unwrap();
        assert_eq!(a, p.companion());
        let (u, _, w) = companion_split(
            &MonicPolynomial::new({
                let mut c = vec![ZERO; 16];
                c[0] = re(-1.0);
                c
            })
            .unwrap(),
        )
        .unwrap();
        assert_eq!(u, circulant_generator(16));
        assert_eq!(w.max_abs(), 0.0);
        assert_eq!(
            companion_split(&MonicPolynomial::new(vec![ONE]).unwrap()).unwrap_err(),
            Error::DegreeTooSmall(1)
        );
    }

    #[test]
    fn reduced_form_is_faithful() {
        let p = MonicPolynomial::from_roots(&[re(1.0), re(2.0), re(3.0)]);
        let f = reduce_companion(&p).unwrap();
        let a = p.companion();
        assert!(f.report.residual <= 10.0 * 3.0 * UNIT_ROUNDOFF * a.frobenius_norm());
        assert!(f.first_column_leakage <= 10.0 * 3.0 * UNIT_ROUNDOFF);
        assert!(f.assemble().sub(&f.b).unwrap().max_abs() <= 1e-14);
    }

    #[test]
    fn small_polynomials() {
        let r = roots(
            &MonicPolynomial::from_high_order(&[ONE, re(-3.0), re(2.0)]).unwrap(),
            ShiftStrategy::Wilkinson,
            100,
        )
        .unwrap();
        let r = sorted_re(r.roots);
        assert!((r[0] - 1.0).norm() < 1e-10 && (r[1] - 2.0).norm() < 1e-10);
        let lin = roots(
            &MonicPolynomial::new(vec![re(-4.0)]).unwrap(),
            ShiftStrategy::Wilkinson,
            1,
        )
        .unwrap();
        assert_eq!(lin.roots, vec![re(4.0)]);
    }

    #[test]
    fn polynomial_text_round_trip() {
        let p = MonicPolynomial::new(vec![Complex64::new(0.1, -0.2), re(3.0)]).unwrap();
        let text = p.to_text();
        assert!(text.starts_with("poly 2\n"));
        assert_eq!(text.parse::<MonicPolynomial>().unwrap(), p);
        assert!("poly 3\n1 0\n".parse::<MonicPolynomial>().is_err());
        assert!("polynomial 1\n1 0\n".parse::<MonicPolynomial>().is_err());
    }

    #[test]
    fn balancing_keeps_roots() {
        let p = MonicPolynomial::from_roots(&[re(100.0), re(200.0), re(-300.0)]);
        let r = roots_with(
            &p,
            &RootOptions {
                balance: true,
                ..Default::default()
            },
        )
        .unwrap();
        let r = sorted_re(r.roots);
        assert!((r[0] + 300.0).norm() < 1e-8 && (r[2] - 200.0).norm() < 1e-8);
    }
}
