//! Stochastic estimate of the number of eigenvalues inside the filter interval.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::filter::{clenshaw_apply, ChebFilter, SpmvCounter};
use crate::rng::{generator, rademacher_matrix, Stream};
use crate::sparse::TiledMatrix;

/// Hutchinson estimate `(1/probes) Σ vᵀ ρ(A) v` of `trace ρ(A)` with
/// Rademacher probes, all probes filtered as one block at degree `k_max`.
pub fn estimate_eigcount(
    a: &TiledMatrix,
    f: &ChebFilter,
    probes: usize,
    seed: u64,
    counter: &mut SpmvCounter,
) -> Result<f64> {
    if probes == 0 {
        return Err(Error::config("trace estimation needs at least one probe"));
    }
    let n = a.n_rows();
    let v = rademacher_matrix(&mut generator(seed, Stream::TraceProbes), n, probes);
    let fv = clenshaw_apply(f, a, &v, f.k_max(), counter)?;
    Ok(column_dot_sum(&v, &fv) / probes as f64)
}

fn column_dot_sum(x: &DenseMatrix, y: &DenseMatrix) -> f64 {
    x.as_slice().iter().zip(y.as_slice()).map(|(a, b)| a * b).sum()
}
