mod common;

use adapoly::dense::DenseMatrix;
use adapoly::rng::{gaussian_matrix, generator, Stream};
use adapoly::solver::estimate_spectrum_bounds;
use adapoly::CsrMatrix;
use common::{dense_eig, random_sparse_symmetric};

fn enclosure_rate(make: impl Fn(u64) -> CsrMatrix) -> usize {
    (0..100u64)
        .filter(|&seed| {
            let a = make(seed);
            let eig = dense_eig(&a);
            let b = estimate_spectrum_bounds(&a, 40, seed).unwrap();
            let n = eig.eigenvalues.len();
            b.lambda_min <= eig.eigenvalues[0] && b.lambda_max >= eig.eigenvalues[n - 1]
        })
        .count()
}

#[test]
fn encloses_random_sparse_spectra() {
    let hits = enclosure_rate(|seed| random_sparse_symmetric(300, 8, 500 + seed));
    eprintln!("sparse: {hits}/100");
    assert!(hits >= 99);
}

#[test]
fn encloses_random_dense_spectra() {
    let hits = enclosure_rate(|seed| {
        let g = gaussian_matrix(&mut generator(900 + seed, Stream::Bench), 300, 300);
        let s: DenseMatrix = g.symmetrized();
        CsrMatrix::from_dense(300, 300, s.as_slice()).unwrap()
    });
    eprintln!("dense: {hits}/100");
    assert!(hits >= 99);
}
