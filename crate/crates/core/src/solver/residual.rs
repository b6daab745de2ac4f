use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::filter::SpmvCounter;
use crate::sparse::{naive_spmm, CsrMatrix};

/// Euclidean residual norms `‖A v_j − λ_j v_j‖₂`, one per column.
pub fn compute_residuals(
    a: &CsrMatrix,
    vectors: &DenseMatrix,
    values: &[f64],
    counter: &mut SpmvCounter,
) -> Result<Vec<f64>> {
    if vectors.n_cols() != values.len() {
        return Err(Error::dims("residual pairs", vectors.n_cols(), values.len()));
    }
    if vectors.n_rows() != a.n_cols() {
        return Err(Error::dims("residual vectors", a.n_cols(), vectors.n_rows()));
    }
    let av = naive_spmm(a, vectors)?;
    counter.add(values.len() as u64);
    let q = values.len();
    let mut sq = vec![0.0; q];
    for r in 0..vectors.n_rows() {
        let (vr, avr) = (vectors.row(r), av.row(r));
        for j in 0..q {
            let d = avr[j] - values[j] * vr[j];
            sq[j] += d * d;
        }
    }
    Ok(sq.into_iter().map(f64::sqrt).collect())
}

/// Smallest distance from an in-interval Ritz value to the endpoints `a`, `b`.
pub fn spurious_threshold(ritz_in_interval: &[f64], a: f64, b: f64) -> Result<f64> {
    if ritz_in_interval.is_empty() {
        return Err(Error::Contract("spurious threshold of an empty Ritz set".into()));
    }
    Ok(ritz_in_interval
        .iter()
        .map(|&x| (x - a).abs().min((x - b).abs()))
        .fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{gaussian_vec, generator, Stream};

    #[test]
    fn threshold_examples() {
        assert!((spurious_threshold(&[0.2, 0.9], 0.0, 1.0).unwrap() - 0.1).abs() < 1e-15);
        assert_eq!(spurious_threshold(&[1.5], 1.0, 2.0).unwrap(), 0.5);
        assert_eq!(spurious_threshold(&[1.0, 1.5], 1.0, 2.0).unwrap(), 0.0);
        assert!(spurious_threshold(&[], 0.0, 1.0).is_err());
    }

    #[test]
    fn exact_pairs_have_zero_residual() {
        let diag = [1.0, -2.0, 3.5, 100.0];
        let a = CsrMatrix::diagonal(&diag);
        let v = DenseMatrix::identity(4);
        let mut counter = SpmvCounter::new();
        let r = compute_residuals(&a, &v, &diag, &mut counter).unwrap();
        assert!(r.iter().all(|&x| x <= 1e-14 * 100.0));
        assert_eq!(counter.get(), 4);
    }

    #[test]
    fn rayleigh_quotient_identity() {
        let n = 60;
        let diag: Vec<f64> = (0..n).map(|i| (i as f64).cos() * 3.0).collect();
        let a = CsrMatrix::diagonal(&diag);
        let mut x = gaussian_vec(&mut generator(1, Stream::Bench), n);
        let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= nx);
        let ax = a.spmv(&x).unwrap();
        let lambda: f64 = x.iter().zip(&ax).map(|(p, q)| p * q).sum();
        let ax2: f64 = ax.iter().map(|v| v * v).sum();
        let vm = DenseMatrix::from_columns(n, &[x]).unwrap();
        let r = compute_residuals(&a, &vm, &[lambda], &mut SpmvCounter::new()).unwrap()[0];
        let expect = ax2 - lambda * lambda;
        assert!((r * r - expect).abs() <= 1e-12 * expect);
    }

    #[test]
    fn dimension_mismatch() {
        let a = CsrMatrix::identity(3);
        let mut c = SpmvCounter::new();
        assert!(compute_residuals(&a, &DenseMatrix::zeros(3, 2), &[1.0], &mut c).is_err());
        assert!(compute_residuals(&a, &DenseMatrix::zeros(4, 1), &[1.0], &mut c).is_err());
    }
}
