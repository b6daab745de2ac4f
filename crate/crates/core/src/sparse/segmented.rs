use crate::dense::DenseMatrix;
use crate::error::{Error, Result};

/// Dense matrix in row-segment layout.
///
/// Columns are split into blocks of width `tk` (the last block may be
/// narrower). Blocks are stored one after another; inside a block each row
/// contributes one contiguous segment of the block's width.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentedDense {
    n_rows: usize,
    n_cols: usize,
    tk: usize,
    data: Vec<f64>,
}

impl SegmentedDense {
    pub fn zeros(n_rows: usize, n_cols: usize, tk: usize) -> Result<Self> {
        if tk == 0 {
            return Err(Error::config("column block width must be at least 1"));
        }
        Ok(Self {
            n_rows,
            n_cols,
            tk,
            data: vec![0.0; n_rows * n_cols],
        })
    }

    pub fn from_dense(m: &DenseMatrix, tk: usize) -> Result<Self> {
        let mut out = Self::zeros(m.n_rows(), m.n_cols(), tk)?;
        for kb in 0..out.n_blocks() {
            let (start, width) = (kb * tk, out.block_width(kb));
            let offset = out.block_offset(kb);
            for r in 0..m.n_rows() {
                let dst = offset + r * width;
                out.data[dst..dst + width].copy_from_slice(&m.row(r)[start..start + width]);
            }
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.n_rows, self.n_cols);
        for kb in 0..self.n_blocks() {
            let (start, width) = (kb * self.tk, self.block_width(kb));
            let block = self.block(kb);
            for r in 0..self.n_rows {
                out.row_mut(r)[start..start + width]
                    .copy_from_slice(&block[r * width..(r + 1) * width]);
            }
        }
        out
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn tk(&self) -> usize {
        self.tk
    }

    pub fn n_blocks(&self) -> usize {
        self.n_cols.div_ceil(self.tk)
    }

    pub fn block_width(&self, kb: usize) -> usize {
        self.tk.min(self.n_cols - kb * self.tk)
    }

    fn block_offset(&self, kb: usize) -> usize {
        kb * self.tk * self.n_rows
    }

    pub fn block(&self, kb: usize) -> &[f64] {
        let off = self.block_offset(kb);
        &self.data[off..off + self.n_rows * self.block_width(kb)]
    }

    pub fn block_mut(&mut self, kb: usize) -> &mut [f64] {
        let off = self.block_offset(kb);
        let len = self.n_rows * self.block_width(kb);
        &mut self.data[off..off + len]
    }

    /// Raw storage; element-wise operations are layout independent.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.n_rows == other.n_rows && self.n_cols == other.n_cols && self.tk == other.tk
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn layout_round_trip(rows in 0usize..9, cols in 0usize..11, tk in 1usize..6) {
            let m = DenseMatrix::from_fn(rows, cols, |r, c| (r * 31 + c) as f64);
            let seg = SegmentedDense::from_dense(&m, tk).unwrap();
            prop_assert_eq!(seg.to_dense(), m);
        }
    }

    #[test]
    fn blocks_are_contiguous_row_segments() {
        let m = DenseMatrix::from_fn(2, 3, |r, c| (10 * r + c) as f64);
        let seg = SegmentedDense::from_dense(&m, 2).unwrap();
        assert_eq!(seg.block(0), &[0.0, 1.0, 10.0, 11.0]);
        assert_eq!(seg.block(1), &[2.0, 12.0]);
    }
}
