//! Dense kernels for the projected problems of the subspace iteration.

mod chol;
mod eig;
mod matrix;
mod ritz;

pub use chol::{cholesky, cholesky_qr, modified_gram_schmidt, OrthoMethod, OrthoOutcome};
pub use eig::{sym_eig, EigDecomposition};
pub use matrix::DenseMatrix;
pub use ritz::{rayleigh_ritz, RitzPairs};
