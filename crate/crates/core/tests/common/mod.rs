#![allow(dead_code)]

use adapoly::dense::{sym_eig, DenseMatrix, EigDecomposition};
use adapoly::rng::{generator, Stream};
use adapoly::CsrMatrix;
use rand::Rng;

/// Random sparse symmetric matrix with about `per_row` off-diagonal entries
/// per row and a random diagonal.
pub fn random_sparse_symmetric(n: usize, per_row: usize, seed: u64) -> CsrMatrix {
    let mut rng = generator(seed, Stream::Bench);
    let mut triplets = Vec::new();
    for i in 0..n {
        triplets.push((i, i, rng.random_range(-1.0..1.0)));
        for _ in 0..per_row / 2 {
            let j = rng.random_range(0..n);
            if j != i {
                let v: f64 = rng.random_range(-1.0..1.0);
                triplets.push((i, j, v));
                triplets.push((j, i, v));
            }
        }
    }
    CsrMatrix::from_triplets(n, n, &triplets).unwrap()
}

pub fn dense_eig(a: &CsrMatrix) -> EigDecomposition {
    let n = a.n_rows();
    sym_eig(&DenseMatrix::from_vec(n, n, a.to_dense()).unwrap()).unwrap()
}

/// Interval whose endpoints are midpoints of spectral gaps, holding the
/// eigenvalues with indices `lo..hi`.
pub fn gap_interval(values: &[f64], lo: usize, hi: usize) -> (f64, f64) {
    let a = if lo == 0 {
        values[0] - 0.5
    } else {
        0.5 * (values[lo - 1] + values[lo])
    };
    let b = if hi == values.len() {
        values[hi - 1] + 0.5
    } else {
        0.5 * (values[hi - 1] + values[hi])
    };
    (a, b)
}

pub fn residual_norm(a: &CsrMatrix, v: &[f64], lambda: f64) -> f64 {
    let av = a.spmv(v).unwrap();
    av.iter()
        .zip(v)
        .map(|(x, y)| (x - lambda * y).powi(2))
        .sum::<f64>()
        .sqrt()
}
