use super::CsrMatrix;
use crate::error::{Error, Result};

/// Default row-block height.
pub const DEFAULT_TILE_ROWS: usize = 256;
/// Default dense column-block width. With the default row height a
/// double-precision output tile is 128 KiB.
pub const DEFAULT_TILE_COLS: usize = 64;

/// Sparse matrix re-laid out for the tiled SpMM kernel.
///
/// Rows are grouped into blocks of `ti` rows. Inside a block, non-zeros
/// are grouped by column ("column segments"), segments ordered by column
/// and entries within a segment ordered by row.
#[derive(Debug, Clone)]
pub struct TiledMatrix {
    n_rows: usize,
    n_cols: usize,
    ti: usize,
    tk: usize,
    /// Per row block, offsets into the segment arrays (`n_row_blocks + 1`).
    act_col_seg: Vec<usize>,
    /// Per segment, offsets into the entry arrays (`n_segments + 1`).
    col_seg_ptr: Vec<usize>,
    /// Column index of each segment.
    seg_col: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
}

impl TiledMatrix {
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn ti(&self) -> usize {
        self.ti
    }

    pub fn tk(&self) -> usize {
        self.tk
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn n_row_blocks(&self) -> usize {
        self.act_col_seg.len() - 1
    }

    pub fn n_segments(&self) -> usize {
        self.seg_col.len()
    }

    /// Segment range of row block `i`.
    pub fn block_segments(&self, i: usize) -> std::ops::Range<usize> {
        self.act_col_seg[i]..self.act_col_seg[i + 1]
    }

    pub fn segment_col(&self, seg: usize) -> usize {
        self.seg_col[seg]
    }

    /// Row indices and values of one column segment.
    pub fn segment_entries(&self, seg: usize) -> (&[usize], &[f64]) {
        let range = self.col_seg_ptr[seg]..self.col_seg_ptr[seg + 1];
        (&self.row_idx[range.clone()], &self.values[range])
    }

    /// All entries as `(row, col, value)`, in tiled storage order.
    pub fn entries(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.nnz());
        for seg in 0..self.n_segments() {
            let col = self.seg_col[seg];
            let (rows, vals) = self.segment_entries(seg);
            out.extend(rows.iter().zip(vals).map(|(&r, &v)| (r, col, v)));
        }
        out
    }

    /// Same layout with a different dense column-block width.
    pub fn with_tk(mut self, tk: usize) -> Result<Self> {
        if tk == 0 {
            return Err(Error::config("T_k must be at least 1"));
        }
        self.tk = tk;
        Ok(self)
    }
}

/// Regroups a CSR matrix into row blocks of height `ti` with column segments.
pub fn csr_to_tiled(a: &CsrMatrix, ti: usize, tk: usize) -> Result<TiledMatrix> {
    if ti == 0 || tk == 0 {
        return Err(Error::config("tile sizes T_i and T_k must be at least 1"));
    }
    let n_blocks = a.n_rows().div_ceil(ti);
    let mut act_col_seg = Vec::with_capacity(n_blocks + 1);
    let mut col_seg_ptr = vec![0usize];
    let mut seg_col = Vec::new();
    let mut row_idx = Vec::with_capacity(a.nnz());
    let mut values = Vec::with_capacity(a.nnz());
    act_col_seg.push(0);

    let mut block: Vec<(usize, usize, f64)> = Vec::new();
    for bi in 0..n_blocks {
        let row_end = ((bi + 1) * ti).min(a.n_rows());
        block.clear();
        for r in bi * ti..row_end {
            let (cols, vals) = a.row(r);
            block.extend(cols.iter().zip(vals).map(|(&c, &v)| (c, r, v)));
        }
        // rows are already ascending, a stable sort by column keeps them so
        block.sort_by_key(|&(c, _, _)| c);
        let mut current: Option<usize> = None;
        for &(c, r, v) in &block {
            if current != Some(c) {
                if current.is_some() {
                    col_seg_ptr.push(row_idx.len());
                }
                seg_col.push(c);
                current = Some(c);
            }
            row_idx.push(r);
            values.push(v);
        }
        if current.is_some() {
            col_seg_ptr.push(row_idx.len());
        }
        act_col_seg.push(seg_col.len());
    }

    Ok(TiledMatrix {
        n_rows: a.n_rows(),
        n_cols: a.n_cols(),
        ti,
        tk,
        act_col_seg,
        col_seg_ptr,
        seg_col,
        row_idx,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tridiagonal(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        CsrMatrix::from_triplets(n, n, &t).unwrap()
    }

    #[test]
    fn tridiagonal_segments() {
        let t = csr_to_tiled(&tridiagonal(4), 2, 1).unwrap();
        assert_eq!(t.n_row_blocks(), 2);
        let cols = |i: usize| -> Vec<usize> {
            t.block_segments(i).map(|s| t.segment_col(s)).collect()
        };
        assert_eq!(cols(0), vec![0, 1, 2]);
        assert_eq!(cols(1), vec![1, 2, 3]);
    }

    #[test]
    fn single_block_segments_are_distinct_columns() {
        let a = CsrMatrix::from_triplets(3, 5, &[(0, 4, 1.0), (1, 0, 1.0), (2, 4, 2.0), (2, 2, 3.0)])
            .unwrap();
        let t = csr_to_tiled(&a, 10, 4).unwrap();
        assert_eq!(t.n_row_blocks(), 1);
        let cols: Vec<usize> = t.block_segments(0).map(|s| t.segment_col(s)).collect();
        assert_eq!(cols, vec![0, 2, 4]);
    }

    #[test]
    fn zero_tile_rejected() {
        assert!(csr_to_tiled(&CsrMatrix::identity(2), 0, 1).is_err());
        assert!(csr_to_tiled(&CsrMatrix::identity(2), 1, 0).is_err());
    }

    fn arb_csr() -> impl Strategy<Value = CsrMatrix> {
        (1usize..40, 1usize..40).prop_flat_map(|(r, c)| {
            proptest::collection::vec((0..r, 0..c, -5.0f64..5.0), 0..120)
                .prop_map(move |t| CsrMatrix::from_triplets(r, c, &t).unwrap())
        })
    }

    proptest! {
        #[test]
        fn tiling_is_lossless(a in arb_csr(), ti in prop::sample::select(vec![1usize, 3, 64])) {
            let t = csr_to_tiled(&a, ti, 8).unwrap();
            let mut entries = t.entries();
            for (r, c, _) in &entries {
                let block = r / ti;
                prop_assert!(*r >= block * ti && *r < ((block + 1) * ti).min(a.n_rows()));
                prop_assert!(*c < a.n_cols());
            }
            for i in 0..t.n_row_blocks() {
                let cols: Vec<usize> = t.block_segments(i).map(|s| t.segment_col(s)).collect();
                prop_assert!(cols.windows(2).all(|w| w[0] < w[1]));
                for s in t.block_segments(i) {
                    for &r in t.segment_entries(s).0 {
                        prop_assert_eq!(r / ti, i);
                    }
                }
            }
            entries.sort_by_key(|&(r, c, _)| (r, c));
            let original: Vec<_> = a.entries().collect();
            prop_assert_eq!(entries, original);
        }
    }
}
