//! Zero/nonzero masks of matrices as text grids or binary PGM images.

use crate::linalg::ComplexMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpyImage {
    pub rows: usize,
    pub cols: usize,
    /// Row-major, `true` where `|t[i][j]| > threshold`.
    grid: Vec<bool>,
}

impl SpyImage {
    pub fn new(t: &ComplexMatrix, threshold: f64) -> Self {
        let (rows, cols) = (t.rows(), t.cols());
        let mut grid = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                grid.push(t[(i, j)].norm() > threshold);
            }
        }
        Self { rows, cols, grid }
    }

    pub fn is_nonzero(&self, i: usize, j: usize) -> bool {
        self.grid[i * self.cols + j]
    }

    /// One line per row, `x` for nonzero and `.` for zero.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.rows * (self.cols + 1));
        for row in self.grid.chunks(self.cols.max(1)).take(self.rows) {
            s.extend(row.iter().map(|&nz| if nz { 'x' } else { '.' }));
            s.push('\n');
        }
        s
    }

    /// Binary P5 image, one pixel per entry: 0 (black) for nonzero, 255 for zero.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.cols, self.rows).into_bytes();
        out.extend(self.grid.iter().map(|&nz| if nz { 0u8 } else { 255 }));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_text() {
        let s = SpyImage::new(&ComplexMatrix::identity(4), 1e-12);
        assert_eq!(s.to_text(), "x...\n.x..\n..x.\n...x\n");
    }

    #[test]
    fn pgm_bytes() {
        let s = SpyImage::new(&ComplexMatrix::identity(2), 1e-12);
        let mut expect = b"P5\n2 2\n255\n".to_vec();
        expect.extend([0, 255, 255, 0]);
        assert_eq!(s.to_pgm(), expect);
    }
}
