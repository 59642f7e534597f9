//! Plain-text matrix format:
//!
//! ```text
//! cmtx <rows> <cols>
//! <re> <im>        (rows·cols lines, column-major)
//! ```
//!
//! Values are written with Rust's shortest round-trip float formatting.

use std::fmt::Write as _;

use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

pub fn write_cmtx(m: &ComplexMatrix) -> String {
    let mut out = format!("cmtx {} {}\n", m.rows(), m.cols());
    for z in m.as_slice() {
        writeln!(out, "{:e} {:e}", z.re, z.im).expect("writing to a String");
    }
    out
}

pub fn read_cmtx(text: &str) -> Result<ComplexMatrix> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty input".into()))?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("cmtx") {
        return Err(Error::Parse(format!("bad header {header:?}")));
    }
    let rows = parse_count(parts.next(), "rows")?;
    let cols = parse_count(parts.next(), "cols")?;
    if parts.next().is_some() {
        return Err(Error::Parse(format!(
            "trailing tokens in header {header:?}"
        )));
    }
    let mut data = Vec::with_capacity(rows * cols);
    for k in 0..rows * cols {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("expected {} entries, found {k}", rows * cols)))?;
        data.push(parse_complex(line)?);
    }
    if let Some(extra) = lines.next() {
        return Err(Error::Parse(format!("unexpected trailing line {extra:?}")));
    }
    ComplexMatrix::from_col_major(rows, cols, data)
}

fn parse_count(tok: Option<&str>, what: &str) -> Result<usize> {
    tok.ok_or_else(|| Error::Parse(format!("missing {what}")))?
        .parse()
        .map_err(|e| Error::Parse(format!("bad {what}: {e}")))
}

/// Parses a `<re> <im>` line; NaN and infinities are rejected.
pub fn parse_complex(line: &str) -> Result<Complex64> {
    let mut it = line.split_whitespace();
    let mut next = |what: &str| -> Result<f64> {
        let v: f64 = it
            .next()
            .ok_or_else(|| Error::Parse(format!("missing {what} in {line:?}")))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad {what} in {line:?}: {e}")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Parse(format!("non-finite value in {line:?}")))
        }
    };
    let re = next("real part")?;
    let im = next("imaginary part")?;
    if it.next().is_some() {
        return Err(Error::Parse(format!("trailing tokens in {line:?}")));
    }
    Ok(Complex64::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;
    use proptest::prelude::*;

    #[test]
    fn header_and_layout() {
        let m =
            ComplexMatrix::from_rows(&[vec![Complex64::new(1.0, 0.0), Complex64::new(0.5, -2.0)]]);
        let s = write_cmtx(&m);
        assert_eq!(s, "cmtx 1 2\n1e0 0e0\n5e-1 -2e0\n");
        assert_eq!(read_cmtx(&s).unwrap(), m);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(read_cmtx("").is_err());
        assert!(read_cmtx("mtx 1 1\n0 0\n").is_err());
        assert!(read_cmtx("cmtx 1 1\nNaN 0\n").is_err());
        assert!(read_cmtx("cmtx 1 1\ninf 0\n").is_err());
        assert!(read_cmtx("cmtx 2 1\n0 0\n").is_err());
        assert!(read_cmtx("cmtx 1 1\n0 0\n1 1\n").is_err());
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(seed in any::<u64>(), rows in 1usize..6, cols in 1usize..6, exp in -300i32..300) {
            let mut rng = SeededRng::new(seed);
            let m = rng.gaussian_matrix(rows, cols).scale(Complex64::new(10f64.powi(exp), 0.0));
            let back = read_cmtx(&write_cmtx(&m)).unwrap();
            prop_assert_eq!(back, m);
        }
    }
}
