use super::{sym_eig, DenseMatrix};
use crate::error::{Error, Result};
use crate::sparse::{naive_spmm, CsrMatrix};

/// Ritz pairs from a Rayleigh-Ritz projection.
#[derive(Debug, Clone)]
pub struct RitzPairs {
    /// `Q·U`, one Ritz vector per column.
    pub vectors: DenseMatrix,
    /// Ascending.
    pub values: Vec<f64>,
}

/// Projects `A` onto the orthonormal basis `Q` and lifts the eigenpairs of
/// `QᵀAQ` back to Ritz pairs.
pub fn rayleigh_ritz(a: &CsrMatrix, q: &DenseMatrix) -> Result<RitzPairs> {
    if q.n_rows() != a.n_cols() {
        return Err(Error::dims("rayleigh_ritz basis", a.n_cols(), q.n_rows()));
    }
    let aq = naive_spmm(a, q)?;
    let projected = q.t_matmul(&aq)?;
    let eig = sym_eig(&projected)?;
    let vectors = q.matmul(&eig.eigenvectors)?;
    Ok(RitzPairs {
        vectors,
        values: eig.eigenvalues,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::cholesky_qr;
    use crate::rng::{gaussian_matrix, generator, Stream};

    #[test]
    fn invariant_subspace() {
        let a = CsrMatrix::diagonal(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let q = DenseMatrix::from_fn(5, 2, |r, c| if r == c { 1.0 } else { 0.0 });
        let rr = rayleigh_ritz(&a, &q).unwrap();
        assert_eq!(rr.values, vec![1.0, 2.0]);
        assert!((rr.vectors[(0, 0)].abs() - 1.0).abs() < 1e-15);
        assert!((rr.vectors[(1, 1)].abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn complete_basis_gives_full_spectrum() {
        let a = CsrMatrix::from_triplets(
            3,
            3,
            &[(0, 0, 2.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 2.0), (2, 2, -1.0)],
        )
        .unwrap();
        let rr = rayleigh_ritz(&a, &DenseMatrix::identity(3)).unwrap();
        let expect = [-1.0, 1.0, 3.0];
        for (v, e) in rr.values.iter().zip(expect) {
            assert!((v - e).abs() < 1e-14);
        }
    }

    #[test]
    fn random_ritz_values_are_bracketed() {
        let n = 60;
        let x = gaussian_matrix(&mut generator(21, Stream::Bench), n, n).symmetrized();
        let a = CsrMatrix::from_dense(n, n, x.as_slice()).unwrap();
        let exact = sym_eig(&x).unwrap().eigenvalues;
        let q = cholesky_qr(&gaussian_matrix(&mut generator(22, Stream::Bench), n, 10))
            .unwrap()
            .q;
        let rr = rayleigh_ritz(&a, &q).unwrap();
        let (lo, hi) = (exact[0], exact[n - 1]);
        assert!(rr.values.iter().all(|&v| v >= lo - 1e-12 && v <= hi + 1e-12));
        // Ritz residuals bounded by the projection residual ‖(I − QQᵀ)AQ‖.
        let aq = naive_spmm(&a, &q).unwrap();
        let leak = aq.sub(&q.matmul(&q.t_matmul(&aq).unwrap()).unwrap()).unwrap();
        let bound = leak.frobenius_norm();
        let av = naive_spmm(&a, &rr.vectors).unwrap();
        for (j, &lam) in rr.values.iter().enumerate() {
            let r: f64 = (0..n)
                .map(|i| (av[(i, j)] - lam * rr.vectors[(i, j)]).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(r <= bound + 1e-10);
        }
    }
}
