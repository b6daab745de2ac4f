//! Damped Chebyshev step-function filters.
//!
//! The filter approximating the indicator of `[a, b]` is
//! `ρ(x) = Σ_{j ≤ deg} c_j d_j T_j(l(x))`, where `l` maps the spectrum
//! enclosure onto `[-1, 1]`, `c_j` are the Chebyshev (Fourier) coefficients
//! of the step function and `d_j` are exponent-`m` Lanczos damping factors.

mod bounds;
mod clenshaw;
mod coeffs;
mod degree;
mod filter;

pub use bounds::{c_m_constant, damped_bound, j_theta, projector_bound, undamped_bound};
pub use clenshaw::{clenshaw_apply, SpmvCounter};
pub use coeffs::{chebyshev_step_coeffs, damping_factor, lanczos_damping};
pub use degree::{adaptive_degree, MIN_ADAPTIVE_DEGREE};
pub use filter::{build_filter, eval_filter_scalar, initial_degree, ChebFilter, SpectrumBounds};
