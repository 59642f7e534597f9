use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::linalg::ComplexMatrix;

/// Which entries a profile admits outside the diagonal blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileShape {
    /// Full off-diagonal blocks (block tridiagonal).
    BlockTridiagonal,
    /// Rank-one off-diagonal blocks compressed to a single column each: the subdiagonal
    /// block `(k+1, k)` keeps only the last column of block `k`, the superdiagonal block
    /// `(k, k+1)` keeps only the first column of block `k+1`.
    Compressed,
}

/// Structural descriptor of a (direct sum of) CMV-like matrices.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CmvProfile {
    pub n: usize,
    pub block_sizes: Vec<usize>,
    pub segment_starts: Vec<usize>,
    pub shape: ProfileShape,
    /// Block index of every row/column.
    #[serde(skip)]
    block_of: Vec<usize>,
    /// Segment index of every row/column.
    #[serde(skip)]
    segment_of: Vec<usize>,
    #[serde(skip)]
    block_starts: Vec<usize>,
}

impl CmvProfile {
    /// Profile from explicit block sizes and segment starts (each segment start must be a
    /// block boundary; index 0 is always a segment start).
    pub fn new(block_sizes: Vec<usize>, segment_starts: &[usize], shape: ProfileShape) -> Self {
        let n: usize = block_sizes.iter().sum();
        let mut block_starts = Vec::with_capacity(block_sizes.len());
        let mut block_of = Vec::with_capacity(n);
        let mut acc = 0;
        for (b, &size) in block_sizes.iter().enumerate() {
            assert!(size > 0, "empty block");
            block_starts.push(acc);
            block_of.extend(std::iter::repeat_n(b, size));
            acc += size;
        }
        let mut starts: Vec<usize> = segment_starts.iter().copied().filter(|&s| s < n).collect();
        if !starts.contains(&0) && n > 0 {
            starts.push(0);
        }
        starts.sort_unstable();
        starts.dedup();
        for s in &starts {
            assert!(
                block_starts.contains(s),
                "segment start {s} is not a block boundary"
            );
        }
        let segment_of = (0..n)
            .map(|i| starts.iter().rposition(|&s| s <= i).unwrap_or(0))
            .collect();
        Self {
            n,
            block_sizes,
            segment_starts: starts,
            shape,
            block_of,
            segment_of,
            block_starts,
        }
    }

    /// Compressed profile for a direct sum of segments of the given sizes, each split into
    /// 2x2 blocks with a trailing 1x1 block when its size is odd.
    pub fn from_segment_sizes(segment_sizes: &[usize]) -> Self {
        let mut blocks = Vec::new();
        let mut starts = Vec::new();
        let mut acc = 0;
        for &size in segment_sizes {
            starts.push(acc);
            blocks.extend(std::iter::repeat_n(2, size / 2));
            if size % 2 == 1 {
                blocks.push(1);
            }
            acc += size;
        }
        Self::new(blocks, &starts, ProfileShape::Compressed)
    }

    /// Single-segment compressed profile of order `n`.
    pub fn single(n: usize) -> Self {
        Self::from_segment_sizes(&[n])
    }

    pub fn block_tridiagonal(block_sizes: Vec<usize>) -> Self {
        Self::new(block_sizes, &[0], ProfileShape::BlockTridiagonal)
    }

    pub fn with_shape(&self, shape: ProfileShape) -> Self {
        Self {
            shape,
            ..self.clone()
        }
    }

    pub fn block_starts(&self) -> &[usize] {
        &self.block_starts
    }

    pub fn block_range(&self, b: usize) -> Range<usize> {
        self.block_starts[b]..self.block_starts[b] + self.block_sizes[b]
    }

    pub fn segments(&self) -> Vec<Range<usize>> {
        let mut out = Vec::with_capacity(self.segment_starts.len());
        for (k, &s) in self.segment_starts.iter().enumerate() {
            let e = self.segment_starts.get(k + 1).copied().unwrap_or(self.n);
            out.push(s..e);
        }
        out
    }

    /// Block indices belonging to segment `k`.
    pub fn segment_blocks(&self, k: usize) -> Range<usize> {
        let seg = &self.segments()[k];
        if seg.is_empty() {
            return 0..0;
        }
        self.block_of[seg.start]..self.block_of[seg.end - 1] + 1
    }

    /// Whether `(i, j)` may hold a nonzero entry.
    pub fn allowed(&self, i: usize, j: usize) -> bool {
        if self.segment_of[i] != self.segment_of[j] {
            return false;
        }
        let (bi, bj) = (self.block_of[i], self.block_of[j]);
        if bi == bj {
            return true;
        }
        match self.shape {
            ProfileShape::BlockTridiagonal => bi.abs_diff(bj) == 1,
            ProfileShape::Compressed => {
                if bi == bj + 1 {
                    let r = self.block_range(bj);
                    j == r.end - 1
                } else if bj == bi + 1 {
                    j == self.block_starts[bj]
                } else {
                    false
                }
            }
        }
    }

    /// Largest magnitude outside the profile and where it occurs.
    pub fn max_off_profile(&self, t: &ComplexMatrix) -> (f64, Option<(usize, usize)>) {
        let mut best = (0.0, None);
        for j in 0..self.n {
            for i in 0..self.n {
                if !self.allowed(i, j) {
                    let a = t[(i, j)].norm();
                    if a > best.0 {
                        best = (a, Some((i, j)));
                    }
                }
            }
        }
        best
    }

    /// Entries outside the profile whose magnitude exceeds `threshold`.
    pub fn off_profile_entries(
        &self,
        t: &ComplexMatrix,
        threshold: f64,
    ) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for j in 0..self.n {
            for i in 0..self.n {
                if !self.allowed(i, j) {
                    let a = t[(i, j)].norm();
                    if a > threshold {
                        out.push((i, j, a));
                    }
                }
            }
        }
        out
    }

    /// Sets every entry outside the profile to exact zero.
    pub fn zero_off_profile(&self, t: &mut ComplexMatrix) {
        for j in 0..self.n {
            for i in 0..self.n {
                if !self.allowed(i, j) {
                    t[(i, j)] = crate::linalg::ZERO;
                }
            }
        }
    }

    /// Pairs `(k+1, k)` of adjacent blocks inside the same segment.
    pub fn coupled_block_pairs(&self) -> Vec<(usize, usize)> {
        (1..self.block_sizes.len())
            .filter(|&b| {
                self.segment_of[self.block_starts[b]] == self.segment_of[self.block_starts[b - 1]]
            })
            .map(|b| (b, b - 1))
            .collect()
    }

    /// `x` / `.` grid of the mask, one line per row.
    pub fn mask_text(&self) -> String {
        let mut s = String::with_capacity(self.n * (self.n + 1));
        for i in 0..self.n {
            for j in 0..self.n {
                s.push(if self.allowed(i, j) { 'x' } else { '.' });
            }
            s.push('\n');
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compressed_pattern_for_six() {
        let p = CmvProfile::single(6);
        let expect = "\
xxx...
xxx...
.xxxx.
.xxxx.
...xxx
...xxx
";
        assert_eq!(p.mask_text(), expect);
    }

    #[test]
    fn odd_order_ends_with_scalar_block() {
        let p = CmvProfile::single(5);
        assert_eq!(p.block_sizes, vec![2, 2, 1]);
        let expect = "\
xxx..
xxx..
.xxxx
.xxxx
...xx
";
        assert_eq!(p.mask_text(), expect);
    }

    #[test]
    fn segments_do_not_couple() {
        let p = CmvProfile::from_segment_sizes(&[4, 3]);
        assert_eq!(p.segment_starts, vec![0, 4]);
        assert_eq!(p.block_sizes, vec![2, 2, 2, 1]);
        assert!(!p.allowed(4, 3));
        assert!(!p.allowed(3, 4));
        assert!(p.allowed(6, 5));
        assert_eq!(p.coupled_block_pairs(), vec![(1, 0), (3, 2)]);
    }

    #[test]
    fn block_tridiagonal_shape() {
        let p = CmvProfile::block_tridiagonal(vec![2, 2, 2]);
        assert!(p.allowed(2, 0));
        assert!(p.allowed(0, 3));
        assert!(!p.allowed(4, 1));
    }
}
