//! Applying the filter to a block of vectors with the Clenshaw recurrence.

use rayon::prelude::*;

use super::ChebFilter;
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::sparse::{maspmm, SegmentedDense, TiledMatrix};

/// Running count of sparse matrix-vector products (an SpMM with `q`
/// columns counts as `q`).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SpmvCounter(u64);

impl SpmvCounter {
    pub fn new() -> Self {
        Self(0)
    }

    pub fn add(&mut self, n: u64) {
        self.0 += n;
    }

    pub fn get(&self) -> u64 {
        self.0
    }
}

const PAR_MIN: usize = 1 << 14;

/// `out[i] = f(i, out[i])`, in parallel for large buffers. Each entry is
/// computed independently, so the result does not depend on the thread count.
fn update(out: &mut [f64], f: impl Fn(usize, f64) -> f64 + Sync) {
    if out.len() < PAR_MIN {
        out.iter_mut().enumerate().for_each(|(i, v)| *v = f(i, *v));
    } else {
        out.par_iter_mut().enumerate().for_each(|(i, v)| *v = f(i, *v));
    }
}

fn spmm(a: &TiledMatrix, x: &SegmentedDense, ax: &mut SegmentedDense) -> Result<()> {
    ax.as_mut_slice().fill(0.0);
    maspmm(a, x, ax)
}

/// Computes `ρ(A) Y` at the given degree using exactly `degree` block
/// products with `A` (fewer if the trailing coefficients vanish).
pub fn clenshaw_apply(
    f: &ChebFilter,
    a: &TiledMatrix,
    y: &DenseMatrix,
    degree: usize,
    counter: &mut SpmvCounter,
) -> Result<DenseMatrix> {
    if a.n_rows() != a.n_cols() {
        return Err(Error::dims("filter operator columns", a.n_rows(), a.n_cols()));
    }
    if y.n_rows() != a.n_cols() {
        return Err(Error::dims("filter block rows", a.n_cols(), y.n_rows()));
    }
    if degree > f.k_max() {
        return Err(Error::config(format!(
            "degree {degree} exceeds the filter's maximum {}",
            f.k_max()
        )));
    }
    if !y.is_finite() {
        return Err(Error::NonFinite("filter input block"));
    }
    let coeffs = f.coeffs();
    let mut k = degree;
    while k > 0 && coeffs[k] == 0.0 {
        k -= 1;
    }
    let (l1, l2) = (f.l1(), f.l2());
    let q = y.n_cols() as u64;
    let tk = a.tk();

    let ys = SegmentedDense::from_dense(y, tk)?;
    let yv = ys.as_slice();
    if k == 0 {
        let mut out = y.clone();
        out.scale(coeffs[0]);
        return Ok(out);
    }

    let mut aw = SegmentedDense::zeros(y.n_rows(), y.n_cols(), tk)?;
    if k == 1 {
        spmm(a, &ys, &mut aw)?;
        counter.add(q);
        let (a0, a1) = (coeffs[0], coeffs[1]);
        let awv = aw.as_slice();
        let mut out = ys.clone();
        update(out.as_mut_slice(), |i, v| a0 * v + a1 * (l1 * awv[i] + l2 * v));
        return Ok(out.to_dense());
    }

    // w = b_{j+1}, v = b_{j+2} with b_j = 2 t(b_{j+1}) − b_{j+2} + a_j Y.
    let mut w = ys.clone();
    let ak = coeffs[k];
    update(w.as_mut_slice(), |_, v| ak * v);
    let mut v = ys.clone();
    spmm(a, &w, &mut aw)?;
    {
        let (awv, wv, akm1) = (aw.as_slice(), w.as_slice(), coeffs[k - 1]);
        update(v.as_mut_slice(), |i, _| {
            2.0 * l1 * awv[i] + 2.0 * l2 * wv[i] + akm1 * yv[i]
        });
    }
    std::mem::swap(&mut v, &mut w);
    for j in (1..=k - 2).rev() {
        spmm(a, &w, &mut aw)?;
        let (awv, wv, aj) = (aw.as_slice(), w.as_slice(), coeffs[j]);
        update(v.as_mut_slice(), |i, old| {
            2.0 * l1 * awv[i] + 2.0 * l2 * wv[i] - old + aj * yv[i]
        });
        std::mem::swap(&mut v, &mut w);
    }
    spmm(a, &w, &mut aw)?;
    {
        let (awv, wv, a0) = (aw.as_slice(), w.as_slice(), coeffs[0]);
        update(v.as_mut_slice(), |i, old| l1 * awv[i] + l2 * wv[i] - old + a0 * yv[i]);
    }
    counter.add(k as u64 * q);
    Ok(v.to_dense())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::{build_filter, SpectrumBounds};
    use crate::rng::{gaussian_matrix, generator, Stream};
    use crate::sparse::{csr_to_tiled, naive_spmm, CsrMatrix};

    fn tridiag(n: usize) -> CsrMatrix {
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
    fn diagonal_matrix_acts_entrywise() {
        let diag: Vec<f64> = (0..40).map(|i| -1.0 + 2.0 * i as f64 / 39.0).collect();
        let a = CsrMatrix::diagonal(&diag);
        let f = build_filter(-0.3, 0.2, SpectrumBounds::new(-1.0, 1.0).unwrap(), 30, 0.5).unwrap();
        let y = gaussian_matrix(&mut generator(1, Stream::Bench), 40, 3);
        let tiled = csr_to_tiled(&a, 7, 2).unwrap();
        for degree in [0, 1, 2, 3, 17, 30] {
            let mut counter = SpmvCounter::new();
            let out = clenshaw_apply(&f, &tiled, &y, degree, &mut counter).unwrap();
            let rho = f.eval_scalar(&diag, degree).unwrap();
            for r in 0..40 {
                for c in 0..3 {
                    assert!((out[(r, c)] - rho[r] * y[(r, c)]).abs() <= 1e-12, "degree {degree}");
                }
            }
            assert_eq!(counter.get(), 3 * degree as u64);
        }
    }

    #[test]
    fn full_interval_is_identity() {
        let a = tridiag(25);
        let f = build_filter(0.0, 4.0, SpectrumBounds::new(0.0, 4.0).unwrap(), 12, 1.0).unwrap();
        let y = gaussian_matrix(&mut generator(2, Stream::Bench), 25, 4);
        let mut counter = SpmvCounter::new();
        let out = clenshaw_apply(&f, &csr_to_tiled(&a, 8, 4).unwrap(), &y, 12, &mut counter).unwrap();
        assert_eq!(out, y);
        assert_eq!(counter.get(), 0);
    }

    #[test]
    fn matches_forward_recurrence() {
        let n = 80;
        let a = tridiag(n);
        let bounds = SpectrumBounds::new(0.0, 4.0).unwrap();
        let f = build_filter(0.9, 1.7, bounds, 40, 0.5).unwrap();
        let y = gaussian_matrix(&mut generator(3, Stream::Bench), n, 6);
        let degree = 25;
        // Σ a_j T_j(L) Y with L = l1 A + l2 I, by the three-term recurrence.
        let apply_l = |x: &DenseMatrix| {
            let mut ax = naive_spmm(&a, x).unwrap();
            ax.scale(f.l1());
            ax.axpy(f.l2(), x).unwrap();
            ax
        };
        let coeffs = f.coeffs();
        let mut t_prev = y.clone();
        let mut t_cur = apply_l(&y);
        let mut expect = y.clone();
        expect.scale(coeffs[0]);
        expect.axpy(coeffs[1], &t_cur).unwrap();
        for &aj in &coeffs[2..=degree] {
            let mut t_next = apply_l(&t_cur);
            t_next.scale(2.0);
            t_next.axpy(-1.0, &t_prev).unwrap();
            expect.axpy(aj, &t_next).unwrap();
            t_prev = t_cur;
            t_cur = t_next;
        }
        let mut counter = SpmvCounter::new();
        let out = clenshaw_apply(&f, &csr_to_tiled(&a, 16, 4).unwrap(), &y, degree, &mut counter).unwrap();
        let err = out.sub(&expect).unwrap().frobenius_norm() / expect.frobenius_norm();
        assert!(err <= 1e-11, "relative error {err}");
        assert_eq!(counter.get(), 6 * degree as u64);
    }

    #[test]
    fn rejects_bad_input() {
        let a = csr_to_tiled(&tridiag(5), 2, 2).unwrap();
        let f = build_filter(1.0, 2.0, SpectrumBounds::new(0.0, 4.0).unwrap(), 5, 0.5).unwrap();
        let mut counter = SpmvCounter::new();
        assert!(clenshaw_apply(&f, &a, &DenseMatrix::zeros(4, 2), 3, &mut counter).is_err());
        assert!(clenshaw_apply(&f, &a, &DenseMatrix::zeros(5, 2), 6, &mut counter).is_err());
        let mut bad = DenseMatrix::zeros(5, 1);
        bad[(0, 0)] = f64::NAN;
        assert!(clenshaw_apply(&f, &a, &bad, 3, &mut counter).is_err());
    }
}
