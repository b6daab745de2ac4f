//! Interior eigenvalue solver for sparse real symmetric matrices.
//!
//! The solver runs a filtered subspace iteration whose filter is a damped
//! Chebyshev expansion of the indicator function of the target interval
//! `[a, b]`. The filter degree is re-selected every iteration from the
//! current Ritz values, converged pairs are locked out of the active basis,
//! and Ritz values that sit inside the interval but belong to eigenvalues
//! outside it are excluded from the convergence test once their residuals
//! show they cannot converge inside.
//!
//! Module map:
//!
//! * [`sparse`]: CSR storage, Matrix Market input, and the tiled SpMM kernel.
//! * [`dense`]: small dense kernels (symmetric eigensolver, Cholesky-QR,
//!   Rayleigh-Ritz).
//! * [`filter`]: filter coefficients, evaluation, Clenshaw application,
//!   adaptive degree selection and pointwise error bounds.
//! * [`solver`]: spectrum bounds, eigenvalue counting and the driver.
//! * [`cli`]: command implementations behind the `adapoly` binary.

pub mod cli;
pub mod dense;
pub mod error;
pub mod filter;
pub mod rng;
pub mod solver;
pub mod sparse;

pub use dense::DenseMatrix;
pub use error::{Error, Result};
pub use filter::{ChebFilter, SpectrumBounds};
pub use solver::{solve, SolveResult, SolverConfig};
pub use sparse::{CsrMatrix, TiledMatrix};
