//! The filtered subspace iteration driver.

use std::time::Instant;

use log::{debug, info, warn};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::config::SolverConfig;
use super::count::estimate_eigcount;
use super::lanczos::estimate_spectrum_bounds_counted;
use super::residual::{compute_residuals, spurious_threshold};
use crate::dense::{cholesky_qr, modified_gram_schmidt, rayleigh_ritz, sym_eig, DenseMatrix};
use crate::error::{Error, Result};
use crate::filter::{
    adaptive_degree, build_filter, clenshaw_apply, initial_degree, ChebFilter, SpectrumBounds,
    SpmvCounter,
};
use crate::rng::{gaussian_matrix, generator, Stream};
use crate::sparse::{csr_to_tiled, CsrMatrix, TiledMatrix, DEFAULT_TILE_COLS, DEFAULT_TILE_ROWS};

/// Count estimates below this are treated as an empty interval.
const EMPTY_COUNT_ESTIMATE: f64 = 0.1;
/// Iterations with no Ritz value inside the interval that are tolerated
/// (after [`EMPTY_GRACE_ITERATIONS`]) before giving up on finding any.
const EMPTY_STREAK_LIMIT: usize = 10;
const EMPTY_GRACE_ITERATIONS: usize = 3;
const MIN_SUBSPACE: usize = 10;
const SUBSPACE_MARGIN: usize = 5;
const SYMMETRY_TOL: f64 = 1e-12;

/// Why the iteration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Every in-interval Ritz pair still under test was locked.
    Converged,
    /// The count estimate or a run of empty iterations showed no eigenvalues in the interval.
    EmptyInterval,
    /// The subspace was at least as large as the matrix; solved densely.
    DenseFallback,
    /// All subspace columns were locked while unconverged pairs remained.
    SubspaceExhausted,
    MaxIterations,
}

/// Statistics of one iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Filter degree applied in this iteration.
    pub degree: usize,
    /// Number of filtered (unlocked) columns.
    pub active_width: usize,
    /// Ritz values inside the interval.
    pub in_interval: usize,
    /// Checked count: in-interval pairs with residual below the spurious threshold, plus locked pairs.
    pub n_check: usize,
    /// Locked pairs after this iteration.
    pub n_locked: usize,
    pub newly_locked: usize,
    /// Largest residual over the in-interval Ritz pairs (absent when there were none).
    pub max_residual: Option<f64>,
    pub spurious_threshold: Option<f64>,
    /// The convergence test was restricted to the checked set.
    pub restricted: bool,
}

/// Wall-clock seconds spent in each stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub setup: f64,
    pub filter: f64,
    pub orth: f64,
    pub rayleigh_ritz: f64,
    pub residuals: f64,
    pub other: f64,
}

/// Result of [`solve`].
#[derive(Debug, Clone)]
pub struct SolveResult {
    /// Ascending, all inside the interval.
    pub eigenvalues: Vec<f64>,
    /// Column `i` pairs with `eigenvalues[i]`.
    pub eigenvectors: DenseMatrix,
    /// Residual norm of each returned pair, measured when it was locked.
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub spmv_total: u64,
    /// Mean filter degree over the iterations.
    pub avg_degree: f64,
    pub max_residual: f64,
    pub converged: bool,
    pub termination: Termination,
    /// Filter degree of each iteration.
    pub degree_history: Vec<usize>,
    pub history: Vec<IterationRecord>,
    pub bounds: SpectrumBounds,
    /// Filter interval after clipping to the spectrum bounds.
    pub filter_interval: (f64, f64),
    pub k_max: usize,
    pub k_initial: usize,
    pub subspace_dim: usize,
    pub eigcount_estimate: Option<f64>,
    pub timings: StageTimings,
}

struct Setup {
    bounds: SpectrumBounds,
    filter: ChebFilter,
    tiled: TiledMatrix,
    k_initial: usize,
    norm_a: f64,
}

struct Locked {
    values: Vec<f64>,
    vectors: Vec<Vec<f64>>,
    residuals: Vec<f64>,
}

impl Locked {
    fn len(&self) -> usize {
        self.values.len()
    }

    fn matrix(&self, n: usize) -> DenseMatrix {
        DenseMatrix::from_columns(n, &self.vectors).expect("locked vectors have length n")
    }
}

fn secs(t: Instant) -> f64 {
    t.elapsed().as_secs_f64()
}

fn validate_matrix(a: &CsrMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::dims("matrix must be square", a.n_rows(), a.n_cols()));
    }
    if a.n_rows() == 0 {
        return Err(Error::config("matrix is empty"));
    }
    if a.values().iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("matrix entries"));
    }
    if let Some((row, col)) = a.symmetry_violation(SYMMETRY_TOL) {
        return Err(Error::NotSymmetric { row, col });
    }
    Ok(())
}

fn setup(a: &CsrMatrix, config: &SolverConfig, counter: &mut SpmvCounter) -> Result<Setup> {
    let bounds = estimate_spectrum_bounds_counted(a, config.lanczos_steps, config.rng_seed, counter)?;
    let (a0, b0) = (config.interval_a, config.interval_b);
    if b0 <= bounds.lambda_min || a0 >= bounds.lambda_max {
        return Err(Error::config(format!(
            "interval [{a0}, {b0}] lies outside the estimated spectrum [{}, {}]",
            bounds.lambda_min, bounds.lambda_max
        )));
    }
    let (fa, fb) = (a0.max(bounds.lambda_min), b0.min(bounds.lambda_max));
    if (fa, fb) != (a0, b0) {
        warn!(
            "interval [{a0}, {b0}] clipped to the estimated spectrum: filtering on [{fa}, {fb}]"
        );
    }
    let alpha = bounds.map(fa).clamp(-1.0, 1.0).acos();
    let beta = bounds.map(fb).clamp(-1.0, 1.0).acos();
    let k_initial = initial_degree(alpha, beta, config.c)?;
    let k_max = ((config.k_multiplier * k_initial as f64).ceil() as usize).max(k_initial);
    let filter = build_filter(fa, fb, bounds, k_max, config.m)?;
    let tiled = csr_to_tiled(
        a,
        config.tile_ti.unwrap_or(DEFAULT_TILE_ROWS),
        config.tile_tk.unwrap_or(DEFAULT_TILE_COLS),
    )?;
    Ok(Setup {
        bounds,
        filter,
        tiled,
        k_initial,
        norm_a: bounds.norm_estimate(),
    })
}

fn subspace_dim(e_tilde: f64, mu: f64, n: usize) -> usize {
    let e = e_tilde.max(0.0).ceil() as usize;
    let p = ((mu * e as f64).ceil() as usize)
        .max(e + SUBSPACE_MARGIN)
        .max(MIN_SUBSPACE);
    p.min(n)
}

/// Orthonormalizes `[locked | x]` and returns the columns after the locked
/// block, replacing any dropped columns with fresh random directions.
fn orthonormalize_active(
    locked: &DenseMatrix,
    x: &DenseMatrix,
    rng: &mut ChaCha20Rng,
) -> Result<DenseMatrix> {
    let n_lock = locked.n_cols();
    let width = x.n_cols();
    let joint = if n_lock == 0 { x.clone() } else { locked.hcat(x)? };
    let mut q = cholesky_qr(&joint)?.q;
    let mut attempts = 0;
    while q.n_cols() < n_lock + width {
        attempts += 1;
        if attempts > 5 {
            return Err(Error::Contract(
                "could not complete the subspace basis with random vectors".into(),
            ));
        }
        let missing = n_lock + width - q.n_cols();
        debug!("refilling {missing} rank-deficient basis column(s)");
        let fill = gaussian_matrix(rng, x.n_rows(), missing);
        q = modified_gram_schmidt(&q.hcat(&fill)?).q;
    }
    Ok(q.column_range(n_lock, n_lock + width))
}

fn dense_fallback(
    a: &CsrMatrix,
    config: &SolverConfig,
    counter: &mut SpmvCounter,
    timings: &mut StageTimings,
) -> Result<(Vec<f64>, DenseMatrix, Vec<f64>)> {
    let n = a.n_rows();
    warn!("subspace dimension reaches the matrix size {n}; using the dense eigensolver");
    let t = Instant::now();
    let dense = DenseMatrix::from_vec(n, n, a.to_dense())?;
    let eig = sym_eig(&dense)?;
    let idx: Vec<usize> = (0..n)
        .filter(|&i| {
            let v = eig.eigenvalues[i];
            v >= config.interval_a && v <= config.interval_b
        })
        .collect();
    let values: Vec<f64> = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = eig.eigenvectors.select_columns(&idx);
    timings.rayleigh_ritz += secs(t);
    let t = Instant::now();
    let residuals = compute_residuals(a, &vectors, &values, counter)?;
    timings.residuals += secs(t);
    Ok((values, vectors, residuals))
}

/// Computes the eigenpairs of symmetric `A` with eigenvalues in
/// `[config.interval_a, config.interval_b]`.
///
/// Reaching `max_iter` is not an error: the result then has
/// `converged = false` and carries the pairs locked so far.
pub fn solve(a: &CsrMatrix, config: &SolverConfig) -> Result<SolveResult> {
    config.validate()?;
    validate_matrix(a)?;
    let n = a.n_rows();
    let (ia, ib) = (config.interval_a, config.interval_b);
    let mut counter = SpmvCounter::new();
    let mut timings = StageTimings::default();
    let started = Instant::now();

    let t = Instant::now();
    let Setup {
        bounds,
        filter,
        tiled,
        k_initial,
        norm_a,
    } = setup(a, config, &mut counter)?;
    let k_max = filter.k_max();
    let (p, eigcount_estimate) = match config.p_override {
        Some(p) => (p.min(n), None),
        None => {
            let e = estimate_eigcount(&tiled, &filter, config.trace_probes, config.rng_seed, &mut counter)?;
            info!("estimated eigenvalue count in interval: {e:.3}");
            (subspace_dim(e, config.mu, n), Some(e))
        }
    };
    timings.setup = secs(t);

    let mut result = SolveResult {
        eigenvalues: Vec::new(),
        eigenvectors: DenseMatrix::zeros(n, 0),
        residuals: Vec::new(),
        iterations: 0,
        spmv_total: 0,
        avg_degree: 0.0,
        max_residual: 0.0,
        converged: true,
        termination: Termination::Converged,
        degree_history: Vec::new(),
        history: Vec::new(),
        bounds,
        filter_interval: filter.interval(),
        k_max,
        k_initial,
        subspace_dim: p,
        eigcount_estimate,
        timings,
    };

    let finish = |mut result: SolveResult, counter: SpmvCounter, mut timings: StageTimings| {
        result.spmv_total = counter.get();
        result.max_residual = result.residuals.iter().copied().fold(0.0, f64::max);
        if !result.degree_history.is_empty() {
            result.avg_degree = result.degree_history.iter().sum::<usize>() as f64
                / result.degree_history.len() as f64;
        }
        let staged = timings.setup
            + timings.filter
            + timings.orth
            + timings.rayleigh_ritz
            + timings.residuals;
        timings.other = (secs(started) - staged).max(0.0);
        result.timings = timings;
        result
    };

    if eigcount_estimate.is_some_and(|e| e < EMPTY_COUNT_ESTIMATE) {
        info!("count estimate below {EMPTY_COUNT_ESTIMATE}; interval treated as empty");
        result.termination = Termination::EmptyInterval;
        return Ok(finish(result, counter, timings));
    }
    if p >= n {
        let (values, vectors, residuals) = dense_fallback(a, config, &mut counter, &mut timings)?;
        result.eigenvalues = values;
        result.eigenvectors = vectors;
        result.residuals = residuals;
        result.termination = Termination::DenseFallback;
        return Ok(finish(result, counter, timings));
    }

    let t = Instant::now();
    let mut refill_rng = generator(config.rng_seed, Stream::BasisRefill);
    let start = gaussian_matrix(&mut generator(config.rng_seed, Stream::InitialBasis), n, p);
    let mut active = orthonormalize_active(&DenseMatrix::zeros(n, 0), &start, &mut refill_rng)?;
    timings.orth += secs(t);

    let mut locked = Locked {
        values: Vec::new(),
        vectors: Vec::new(),
        residuals: Vec::new(),
    };
    let mut degree = k_initial.min(k_max);
    let mut n_check_prev = 0usize;
    let mut empty_streak = 0usize;
    result.termination = Termination::MaxIterations;

    for iteration in 1..=config.max_iter {
        result.iterations = iteration;
        let width = active.n_cols();
        if width == 0 {
            warn!("all {p} subspace columns are locked; stopping");
            result.termination = Termination::SubspaceExhausted;
            break;
        }
        result.degree_history.push(degree);

        let t = Instant::now();
        let filtered = clenshaw_apply(&filter, &tiled, &active, degree, &mut counter)?;
        timings.filter += secs(t);

        let t = Instant::now();
        let locked_mat = locked.matrix(n);
        let basis = orthonormalize_active(&locked_mat, &filtered, &mut refill_rng)?;
        timings.orth += secs(t);

        let t = Instant::now();
        let ritz = rayleigh_ritz(a, &basis)?;
        counter.add(width as u64);
        timings.rayleigh_ritz += secs(t);

        let inside: Vec<usize> = (0..width)
            .filter(|&j| ritz.values[j] >= ia && ritz.values[j] <= ib)
            .collect();
        let mut record = IterationRecord {
            iteration,
            degree,
            active_width: width,
            in_interval: inside.len(),
            n_check: 0,
            n_locked: locked.len(),
            newly_locked: 0,
            max_residual: None,
            spurious_threshold: None,
            restricted: false,
        };

        if inside.is_empty() {
            if iteration > EMPTY_GRACE_ITERATIONS {
                empty_streak += 1;
            }
            active = ritz.vectors;
            result.history.push(record);
            debug!("iteration {iteration}: no Ritz values inside the interval");
            if empty_streak >= EMPTY_STREAK_LIMIT {
                info!("no Ritz values in the interval for {EMPTY_STREAK_LIMIT} iterations; stopping");
                result.termination = Termination::EmptyInterval;
                break;
            }
            continue;
        }
        empty_streak = 0;

        let next_degree = adaptive_degree(&filter, &ritz.values, inside.len(), config.tau_a)?;

        let t = Instant::now();
        let inside_values: Vec<f64> = inside.iter().map(|&j| ritz.values[j]).collect();
        let inside_vectors = ritz.vectors.select_columns(&inside);
        let res = compute_residuals(a, &inside_vectors, &inside_values, &mut counter)?;
        timings.residuals += secs(t);

        let tau_s = spurious_threshold(&inside_values, ia, ib)?;
        let checked: Vec<usize> = (0..inside.len()).filter(|&i| res[i] < tau_s).collect();
        let n_check = checked.len() + locked.len();
        // Positions into `inside` that remain under the convergence test.
        let mut tested: Vec<usize> = (0..inside.len()).collect();
        if !config.disable_spurious_check && tau_s > 0.0 && n_check > 0 && n_check == n_check_prev {
            tested = checked;
            record.restricted = true;
        }
        n_check_prev = n_check;

        let lock_tol = config.tau_c * norm_a;
        let lock: Vec<usize> = tested.iter().copied().filter(|&i| res[i] < lock_tol).collect();
        for &i in &lock {
            locked.values.push(inside_values[i]);
            locked.vectors.push(inside_vectors.column(i));
            locked.residuals.push(res[i]);
        }
        let mut is_locked = vec![false; width];
        for &i in &lock {
            is_locked[inside[i]] = true;
        }
        let keep: Vec<usize> = (0..width).filter(|&j| !is_locked[j]).collect();
        active = ritz.vectors.select_columns(&keep);

        record.n_check = n_check;
        record.n_locked = locked.len();
        record.newly_locked = lock.len();
        record.max_residual = Some(res.iter().copied().fold(0.0, f64::max));
        record.spurious_threshold = Some(tau_s);
        debug!(
            "iteration {iteration}: degree {degree}, e = {}, locked {} (+{}), max residual {:.3e}",
            inside.len(),
            locked.len(),
            lock.len(),
            record.max_residual.unwrap_or(0.0)
        );
        result.history.push(record);

        if tested.len() == lock.len() {
            result.termination = Termination::Converged;
            break;
        }
        degree = next_degree;
    }

    result.converged = matches!(
        result.termination,
        Termination::Converged | Termination::EmptyInterval
    );
    let mut order: Vec<usize> = (0..locked.len()).collect();
    order.sort_by(|&i, &j| locked.values[i].total_cmp(&locked.values[j]));
    result.eigenvalues = order.iter().map(|&i| locked.values[i]).collect();
    result.residuals = order.iter().map(|&i| locked.residuals[i]).collect();
    let columns: Vec<Vec<f64>> = order.iter().map(|&i| locked.vectors[i].clone()).collect();
    result.eigenvectors = DenseMatrix::from_columns(n, &columns)?;
    Ok(finish(result, counter, timings))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subspace_dimension_rule() {
        assert_eq!(subspace_dim(0.0, 1.8, 1000), 10);
        assert_eq!(subspace_dim(4.2, 1.8, 1000), 10);
        assert_eq!(subspace_dim(10.0, 1.8, 1000), 18);
        assert_eq!(subspace_dim(100.5, 1.8, 1000), 182);
        assert_eq!(subspace_dim(3.0, 1.0, 1000), 10);
        assert_eq!(subspace_dim(20.0, 1.0, 1000), 25);
        assert_eq!(subspace_dim(20.0, 1.8, 30), 30);
        assert_eq!(subspace_dim(-0.3, 1.8, 1000), 10);
    }

    #[test]
    fn diagonal_interval() {
        let diag: Vec<f64> = (1..=100).map(f64::from).collect();
        let a = CsrMatrix::diagonal(&diag);
        let r = solve(&a, &SolverConfig::with_interval(10.5, 20.5)).unwrap();
        assert!(r.converged, "{:?}", r.termination);
        assert_eq!(r.eigenvalues.len(), 10);
        for (i, v) in r.eigenvalues.iter().enumerate() {
            assert!((v - (11 + i) as f64).abs() <= 1e-8 * 100.0);
        }
        assert!(r.max_residual <= 1e-10 * 100.0);
    }

    #[test]
    fn rejects_bad_input() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 1, 1.0)]).unwrap();
        assert!(matches!(
            solve(&a, &SolverConfig::with_interval(0.0, 1.0)),
            Err(Error::NotSymmetric { .. })
        ));
        let diag: Vec<f64> = (1..=30).map(f64::from).collect();
        let a = CsrMatrix::diagonal(&diag);
        assert!(solve(&a, &SolverConfig::with_interval(50.0, 60.0)).is_err());
        assert!(solve(&a, &SolverConfig::with_interval(5.0, 4.0)).is_err());
    }
}
