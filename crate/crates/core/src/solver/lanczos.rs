//! Spectrum enclosure from a short Lanczos run.

use log::debug;

use crate::dense::{sym_eig, DenseMatrix};
use crate::error::{Error, Result};
use crate::filter::{SpectrumBounds, SpmvCounter};
use crate::rng::{gaussian_vec, generator, Stream};
use crate::sparse::CsrMatrix;

const MAX_RESTARTS: usize = 3;

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// Two passes of classical Gram-Schmidt against the stored basis.
fn reorthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for v in basis {
            let h = dot(v, w);
            w.iter_mut().zip(v).for_each(|(wi, vi)| *wi -= h * vi);
        }
    }
}

/// Encloses the spectrum of symmetric `A` using `steps` Lanczos iterations
/// with full reorthogonalization from a seeded random start.
///
/// The returned interval is `[θ_min − r_min, θ_max + r_max]`, where `θ` are
/// the extreme eigenvalues of the Lanczos tridiagonal matrix and `r` their
/// residual norms `|β_last · u_last|`.
pub fn estimate_spectrum_bounds(a: &CsrMatrix, steps: usize, seed: u64) -> Result<SpectrumBounds> {
    estimate_spectrum_bounds_counted(a, steps, seed, &mut SpmvCounter::new())
}

/// [`estimate_spectrum_bounds`], adding the matrix-vector products used to `counter`.
pub fn estimate_spectrum_bounds_counted(
    a: &CsrMatrix,
    steps: usize,
    seed: u64,
    counter: &mut SpmvCounter,
) -> Result<SpectrumBounds> {
    if !a.is_square() {
        return Err(Error::dims("spectrum bounds: square matrix", a.n_rows(), a.n_cols()));
    }
    if steps < 2 {
        return Err(Error::config("Lanczos needs at least 2 steps"));
    }
    let n = a.n_rows();
    if n == 0 {
        return Err(Error::config("matrix is empty"));
    }
    let steps = steps.min(n);
    let scale = a.inf_norm().max(f64::MIN_POSITIVE);
    let breakdown_tol = 1e-12 * scale;
    let mut rng = generator(seed, Stream::Lanczos);

    let mut v = gaussian_vec(&mut rng, n);
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(steps);
    let mut alphas = Vec::with_capacity(steps);
    let mut betas: Vec<f64> = Vec::with_capacity(steps);
    let mut beta_last = 0.0;
    let mut restarts = 0;

    while basis.len() < steps {
        let mut w = a.spmv(&v)?;
        counter.add(1);
        let alpha = dot(&v, &w);
        basis.push(v);
        reorthogonalize(&mut w, &basis);
        alphas.push(alpha);
        let beta = norm(&w);
        if !beta.is_finite() {
            return Err(Error::NonFinite("Lanczos recurrence"));
        }
        if basis.len() == steps {
            beta_last = beta;
            break;
        }
        if beta > breakdown_tol {
            w.iter_mut().for_each(|x| *x /= beta);
            betas.push(beta);
            v = w;
            continue;
        }
        // Breakdown: the Krylov space is invariant. Continue in a fresh
        // direction orthogonal to everything seen so far.
        if restarts == MAX_RESTARTS || basis.len() == n {
            debug!("Lanczos stopped after {} steps ({restarts} restarts)", basis.len());
            break;
        }
        restarts += 1;
        let mut fresh = gaussian_vec(&mut rng, n);
        let before = norm(&fresh);
        reorthogonalize(&mut fresh, &basis);
        let after = norm(&fresh);
        if after <= 1e-10 * before {
            break;
        }
        fresh.iter_mut().for_each(|x| *x /= after);
        betas.push(0.0);
        v = fresh;
    }

    let j = alphas.len();
    let mut t = DenseMatrix::zeros(j, j);
    for i in 0..j {
        t[(i, i)] = alphas[i];
        if i + 1 < j {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = sym_eig(&t)?;
    let r_min = (beta_last * eig.eigenvectors[(j - 1, 0)]).abs();
    let r_max = (beta_last * eig.eigenvectors[(j - 1, j - 1)]).abs();
    let mut lo = eig.eigenvalues[0] - r_min;
    let mut hi = eig.eigenvalues[j - 1] + r_max;
    let width_floor = 1e-12 * lo.abs().max(hi.abs());
    if hi - lo <= width_floor {
        let widen = (f64::EPSILON * n as f64 * hi.abs()).max(1e-8);
        lo -= widen;
        hi += widen;
    }
    SpectrumBounds::new(lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_full_dimension_is_exact() {
        let diag: Vec<f64> = (1..=10).map(f64::from).collect();
        let b = estimate_spectrum_bounds(&CsrMatrix::diagonal(&diag), 10, 3).unwrap();
        assert!(b.lambda_min <= 1.0 && b.lambda_min >= 1.0 - 1e-8, "{b:?}");
        assert!(b.lambda_max >= 10.0 && b.lambda_max <= 10.0 + 1e-8, "{b:?}");
    }

    #[test]
    fn identity_is_widened() {
        let b = estimate_spectrum_bounds(&CsrMatrix::identity(50), 10, 1).unwrap();
        assert!(b.lambda_min < 1.0 && b.lambda_max > 1.0);
        assert!(b.lambda_max - b.lambda_min <= 1e-6);
    }

    #[test]
    fn breakdown_restarts() {
        // Two eigenvalues only: the Krylov space has dimension 2.
        let diag: Vec<f64> = (0..40).map(|i| if i % 2 == 0 { -3.0 } else { 5.0 }).collect();
        let mut counter = SpmvCounter::new();
        let b = estimate_spectrum_bounds_counted(&CsrMatrix::diagonal(&diag), 20, 9, &mut counter).unwrap();
        assert!(b.lambda_min <= -3.0 && b.lambda_min > -3.0 - 1e-6, "{b:?}");
        assert!(b.lambda_max >= 5.0 && b.lambda_max < 5.0 + 1e-6, "{b:?}");
        assert!(counter.get() >= 2 && counter.get() <= 20);
    }

    #[test]
    fn deterministic_for_seed() {
        let diag: Vec<f64> = (0..200).map(|i| (i as f64 * 0.37).sin()).collect();
        let a = CsrMatrix::diagonal(&diag);
        assert_eq!(
            estimate_spectrum_bounds(&a, 30, 5).unwrap(),
            estimate_spectrum_bounds(&a, 30, 5).unwrap()
        );
        assert!(estimate_spectrum_bounds(&a, 1, 5).is_err());
    }
}
