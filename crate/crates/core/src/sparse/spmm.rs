//! Sparse matrix times dense block.

use rayon::prelude::*;

use super::{CsrMatrix, SegmentedDense, TiledMatrix};
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};

/// Conventional row-by-row CSR SpMM on row-major operands.
///
/// Every output entry accumulates its row's contributions in ascending
/// column order, which makes this the reference for the tiled kernel.
pub fn naive_spmm(a: &CsrMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if b.n_rows() != a.n_cols() {
        return Err(Error::dims("spmm operand rows", a.n_cols(), b.n_rows()));
    }
    let k = b.n_cols();
    let mut c = DenseMatrix::zeros(a.n_rows(), k);
    if k == 0 {
        return Ok(c);
    }
    c.as_mut_slice()
        .par_chunks_mut(k)
        .enumerate()
        .for_each(|(r, out)| {
            let (cols, vals) = a.row(r);
            for (&col, &v) in cols.iter().zip(vals) {
                for (o, &x) in out.iter_mut().zip(b.row(col)) {
                    *o += v * x;
                }
            }
        });
    Ok(c)
}

/// Memory-aware tiled SpMM: `C += A·B`.
///
/// The outer loop walks dense column blocks of width `T_k`; inside a block
/// the row blocks of `A` are processed in parallel, each worker owning one
/// contiguous `T_i × T_k` tile of `C`. For each column segment the matching
/// row segment of `B` is loaded once and broadcast-multiplied into every
/// affected row of the tile. Accumulation order per output entry is fixed
/// (ascending column), so the result does not depend on the worker count.
pub fn maspmm(a: &TiledMatrix, b: &SegmentedDense, c: &mut SegmentedDense) -> Result<()> {
    if b.n_rows() != a.n_cols() {
        return Err(Error::dims("maspmm B rows", a.n_cols(), b.n_rows()));
    }
    if c.n_rows() != a.n_rows() {
        return Err(Error::dims("maspmm C rows", a.n_rows(), c.n_rows()));
    }
    if c.n_cols() != b.n_cols() {
        return Err(Error::dims("maspmm C cols", b.n_cols(), c.n_cols()));
    }
    if b.tk() != a.tk() || c.tk() != a.tk() {
        return Err(Error::dims("maspmm column block width", a.tk(), b.tk()));
    }
    if b.n_cols() == 0 || a.n_rows() == 0 {
        return Ok(());
    }

    let ti = a.ti();
    for kb in 0..b.n_blocks() {
        let width = b.block_width(kb);
        let b_blk = b.block(kb);
        c.block_mut(kb)
            .par_chunks_mut(ti * width)
            .enumerate()
            .for_each(|(i, tile)| {
                let row0 = i * ti;
                for seg in a.block_segments(i) {
                    let col = a.segment_col(seg);
                    let b_seg = &b_blk[col * width..(col + 1) * width];
                    let (rows, vals) = a.segment_entries(seg);
                    for (&row, &v) in rows.iter().zip(vals) {
                        let local = (row - row0) * width;
                        for (o, &x) in tile[local..local + width].iter_mut().zip(b_seg) {
                            *o += v * x;
                        }
                    }
                }
            });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{gaussian_matrix, generator, Stream};
    use crate::sparse::csr_to_tiled;
    use rand::Rng;

    fn random_csr(n: usize, density: f64, seed: u64) -> CsrMatrix {
        let mut rng = generator(seed, Stream::Bench);
        let mut t = Vec::new();
        for r in 0..n {
            for c in 0..n {
                if rng.random_bool(density) {
                    t.push((r, c, rng.random_range(-1.0..1.0)));
                }
            }
        }
        CsrMatrix::from_triplets(n, n, &t).unwrap()
    }

    fn run_maspmm(a: &CsrMatrix, b: &DenseMatrix, ti: usize, tk: usize) -> DenseMatrix {
        let t = csr_to_tiled(a, ti, tk).unwrap();
        let bs = SegmentedDense::from_dense(b, tk).unwrap();
        let mut cs = SegmentedDense::zeros(a.n_rows(), b.n_cols(), tk).unwrap();
        maspmm(&t, &bs, &mut cs).unwrap();
        cs.to_dense()
    }

    #[test]
    fn naive_hand_example() {
        let a = CsrMatrix::from_dense(3, 3, &[1.0, 0.0, 2.0, 0.0, 3.0, 0.0, 4.0, 0.0, 5.0]).unwrap();
        let b = DenseMatrix::from_vec(3, 2, vec![1.0; 6]).unwrap();
        let c = naive_spmm(&a, &b).unwrap();
        assert_eq!(c.as_slice(), &[3.0, 3.0, 3.0, 3.0, 9.0, 9.0]);
    }

    #[test]
    fn naive_identity_and_diagonal() {
        let b = gaussian_matrix(&mut generator(1, Stream::Bench), 4, 3);
        assert_eq!(naive_spmm(&CsrMatrix::identity(4), &b).unwrap(), b);
        let d = [2.0, -1.0, 0.5, 3.0];
        let c = naive_spmm(&CsrMatrix::diagonal(&d), &b).unwrap();
        for r in 0..4 {
            for k in 0..3 {
                assert_eq!(c[(r, k)], d[r] * b[(r, k)]);
            }
        }
    }

    #[test]
    fn maspmm_identity() {
        let b = gaussian_matrix(&mut generator(4, Stream::Bench), 8, 5);
        for (ti, tk) in [(1, 1), (3, 2), (8, 5), (100, 64)] {
            assert_eq!(run_maspmm(&CsrMatrix::identity(8), &b, ti, tk), b);
        }
    }

    #[test]
    fn maspmm_zero_operator_leaves_c() {
        let a = CsrMatrix::from_triplets(6, 6, &[]).unwrap();
        let t = csr_to_tiled(&a, 4, 3).unwrap();
        let init = gaussian_matrix(&mut generator(5, Stream::Bench), 6, 4);
        let b = SegmentedDense::from_dense(&gaussian_matrix(&mut generator(6, Stream::Bench), 6, 4), 3).unwrap();
        let mut c = SegmentedDense::from_dense(&init, 3).unwrap();
        maspmm(&t, &b, &mut c).unwrap();
        assert_eq!(c.to_dense(), init);
    }

    #[test]
    fn maspmm_accumulates() {
        let a = random_csr(30, 0.2, 8);
        let b = gaussian_matrix(&mut generator(9, Stream::Bench), 30, 7);
        let t = csr_to_tiled(&a, 4, 3).unwrap();
        let bs = SegmentedDense::from_dense(&b, 3).unwrap();
        let mut cs = SegmentedDense::zeros(30, 7, 3).unwrap();
        maspmm(&t, &bs, &mut cs).unwrap();
        maspmm(&t, &bs, &mut cs).unwrap();
        let mut twice = naive_spmm(&a, &b).unwrap();
        twice.scale(2.0);
        assert!(cs.to_dense().sub(&twice).unwrap().frobenius_norm() <= 1e-13 * twice.frobenius_norm());
    }

    #[test]
    fn maspmm_matches_naive_random() {
        let a = random_csr(200, 0.05, 10);
        let b = gaussian_matrix(&mut generator(11, Stream::Bench), 200, 32);
        let reference = naive_spmm(&a, &b).unwrap();
        let got = run_maspmm(&a, &b, 64, 8);
        let err = got.sub(&reference).unwrap().frobenius_norm() / reference.frobenius_norm();
        assert!(err <= 1e-13, "relative error {err}");
    }

    #[test]
    fn maspmm_dimension_checks() {
        let a = csr_to_tiled(&CsrMatrix::identity(3), 2, 2).unwrap();
        let b = SegmentedDense::zeros(4, 2, 2).unwrap();
        let mut c = SegmentedDense::zeros(3, 2, 2).unwrap();
        assert!(maspmm(&a, &b, &mut c).is_err());
        let b = SegmentedDense::zeros(3, 2, 1).unwrap();
        assert!(maspmm(&a, &b, &mut c).is_err());
    }

    #[test]
    fn maspmm_empty_block_is_noop() {
        let a = csr_to_tiled(&CsrMatrix::identity(3), 2, 2).unwrap();
        let b = SegmentedDense::zeros(3, 0, 2).unwrap();
        let mut c = SegmentedDense::zeros(3, 0, 2).unwrap();
        maspmm(&a, &b, &mut c).unwrap();
    }
}
