//! JSON report emitted by `adapoly solve`.

use serde::{Deserialize, Serialize};

use crate::filter::SpectrumBounds;
use crate::solver::{IterationRecord, SolveResult, SolverConfig, StageTimings, Termination};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixInfo {
    pub path: String,
    pub n: usize,
    pub nnz: usize,
}

/// Solver output without the eigenvectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultSummary {
    pub converged: bool,
    pub termination: Termination,
    pub n_eigenvalues: usize,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub iterations: usize,
    pub spmv_total: u64,
    pub avg_degree: f64,
    pub degree_history: Vec<usize>,
    pub spectrum_bounds: SpectrumBounds,
    pub norm_estimate: f64,
    pub filter_interval: [f64; 2],
    pub k_initial: usize,
    pub k_max: usize,
    pub subspace_dim: usize,
    pub eigcount_estimate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: SolverConfig,
    pub matrix: MatrixInfo,
    pub threads: usize,
    pub result: ResultSummary,
    pub iterations: Vec<IterationRecord>,
    /// Wall-clock seconds per stage; the only non-deterministic section.
    pub timings: StageTimings,
}

impl RunReport {
    pub fn new(config: SolverConfig, matrix: MatrixInfo, threads: usize, r: &SolveResult) -> Self {
        Self {
            config,
            matrix,
            threads,
            result: ResultSummary {
                converged: r.converged,
                termination: r.termination,
                n_eigenvalues: r.eigenvalues.len(),
                eigenvalues: r.eigenvalues.clone(),
                residuals: r.residuals.clone(),
                max_residual: r.max_residual,
                iterations: r.iterations,
                spmv_total: r.spmv_total,
                avg_degree: r.avg_degree,
                degree_history: r.degree_history.clone(),
                spectrum_bounds: r.bounds,
                norm_estimate: r.bounds.norm_estimate(),
                filter_interval: [r.filter_interval.0, r.filter_interval.1],
                k_initial: r.k_initial,
                k_max: r.k_max,
                subspace_dim: r.subspace_dim,
                eigcount_estimate: r.eigcount_estimate,
            },
            iterations: r.history.clone(),
            timings: r.timings,
        }
    }
}
