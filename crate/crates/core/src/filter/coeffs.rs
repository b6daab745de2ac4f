use std::f64::consts::PI;

use crate::error::{Error, Result};

/// `sin(j·x)` with the product `j·x` carried to twice working precision.
/// Angles of exactly `0` and `π` return an exact zero.
fn sin_multiple(j: usize, x: f64) -> f64 {
    if x == 0.0 || x == PI {
        return 0.0;
    }
    let jf = j as f64;
    let hi = jf * x;
    let lo = jf.mul_add(x, -hi);
    hi.sin() + hi.cos() * lo
}

/// Chebyshev coefficients `c_0..=c_k` of the step function that is one on
/// the mapped interval with angles `β < θ < α`.
///
/// `c_0 = (α − β)/π`, `c_j = 2 (sin jα − sin jβ) / (π j)`.
pub fn chebyshev_step_coeffs(alpha: f64, beta: f64, k: usize) -> Vec<f64> {
    let mut c = Vec::with_capacity(k + 1);
    c.push((alpha - beta) / PI);
    for j in 1..=k {
        let diff = sin_multiple(j, alpha) - sin_multiple(j, beta);
        c.push(2.0 * diff / (PI * j as f64));
    }
    c
}

/// Exponent-`m` Lanczos factor `(sin(jπ/(k+1)) / (jπ/(k+1)))^m`; `1` at `j = 0`.
pub fn damping_factor(j: usize, k: usize, m: f64) -> f64 {
    if j == 0 {
        return 1.0;
    }
    let t = j as f64 * PI / (k as f64 + 1.0);
    (t.sin() / t).powf(m)
}

/// Damping factors `d_0..=d_k` for degree `k`.
pub fn lanczos_damping(k: usize, m: f64) -> Result<Vec<f64>> {
    if k < 1 {
        return Err(Error::config("damping requires degree k >= 1"));
    }
    if !(m >= 0.0) || !m.is_finite() {
        return Err(Error::config(format!("damping exponent m must be >= 0, got {m}")));
    }
    Ok((0..=k).map(|j| damping_factor(j, k, m)).collect())
}
