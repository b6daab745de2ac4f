//! Spectrum bounds, eigenvalue counting and the filtered subspace iteration.

mod config;
mod count;
mod lanczos;
mod residual;
mod solve;

pub use config::SolverConfig;
pub use count::estimate_eigcount;
pub use lanczos::{estimate_spectrum_bounds, estimate_spectrum_bounds_counted};
pub use residual::{compute_residuals, spurious_threshold};
pub use solve::{solve, IterationRecord, SolveResult, StageTimings, Termination};
