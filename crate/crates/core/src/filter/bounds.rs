//! Pointwise error bounds for truncated and damped step-function series.
//!
//! All bounds are stated in the angle variable `θ = arccos(l(x)) ∈ [0, π]`,
//! where the filter's left endpoint sits at `α` and its right endpoint at
//! `β < α`.

use std::f64::consts::PI;

use super::coeffs::damping_factor;
use super::ChebFilter;
use crate::error::{Error, Result};

/// Reciprocal-sine sum `J(θ)` controlling the pointwise series error.
///
/// Away from the discontinuities it is the sum of `1/|sin((θ ± α)/2)|` and
/// `1/|sin((θ ± β)/2)|`; at `θ = α` or `θ = β` the singular term is
/// replaced. A vanishing sine yields `+∞`.
pub fn j_theta(theta: f64, alpha: f64, beta: f64) -> f64 {
    let inv = |x: f64| 1.0 / x.sin().abs();
    let shared = inv((alpha + beta) / 2.0) + inv((alpha - beta) / 2.0);
    if theta == alpha {
        inv(alpha) + shared
    } else if theta == beta {
        inv(beta) + shared
    } else {
        inv((theta + alpha) / 2.0)
            + inv((theta - alpha) / 2.0)
            + inv((theta + beta) / 2.0)
            + inv((theta - beta) / 2.0)
    }
}

/// Error bound `J(θ) / (π (k + 1))` of the undamped partial sum of degree `k`.
pub fn undamped_bound(theta: f64, k: usize, alpha: f64, beta: f64) -> f64 {
    j_theta(theta, alpha, beta) / (PI * (k as f64 + 1.0))
}

/// Error bound of the damped partial sum truncated at `k_i ≤ k`, with
/// damping computed for degree `k`:
///
/// `d_{k_i,k} J/(π(k_i+1)) + m C_m J/(k+1) + m π (π − θ) / (3 (k+1)²)`.
pub fn damped_bound(theta: f64, k_i: usize, k: usize, m: f64, alpha: f64, beta: f64) -> Result<f64> {
    let cm = if m > 0.0 { c_m_constant(m)? } else { 0.0 };
    damped_bound_with_cm(theta, k_i, k, m, alpha, beta, cm)
}

pub(crate) fn damped_bound_with_cm(
    theta: f64,
    k_i: usize,
    k: usize,
    m: f64,
    alpha: f64,
    beta: f64,
    cm: f64,
) -> Result<f64> {
    if k_i < 1 || k_i > k {
        return Err(Error::config(format!("need 1 <= k_i <= k, got k_i={k_i}, k={k}")));
    }
    if !(m >= 0.0) {
        return Err(Error::config(format!("damping exponent must be >= 0, got {m}")));
    }
    let j = j_theta(theta, alpha, beta);
    let kp1 = k as f64 + 1.0;
    let truncation = damping_factor(k_i, k, m) * j / (PI * (k_i as f64 + 1.0));
    if m == 0.0 {
        return Ok(truncation);
    }
    Ok(truncation + m * cm * j / kp1 + m * PI * (PI - theta) / (3.0 * kp1 * kp1))
}

/// Bound on `‖P − ρ(A)‖₂` given the angles of the eigenvalues of `A`
/// (only available when the spectrum is known, e.g. in diagnostics).
pub fn projector_bound(filter: &ChebFilter, eigen_thetas: &[f64], k_i: usize) -> Result<f64> {
    if eigen_thetas.is_empty() {
        return Err(Error::config("projector bound needs at least one eigenvalue angle"));
    }
    let (k, m) = (filter.k_max(), filter.m());
    if k_i < 1 || k_i > k {
        return Err(Error::config(format!("need 1 <= k_i <= k, got k_i={k_i}, k={k}")));
    }
    let j_star = eigen_thetas
        .iter()
        .map(|&t| j_theta(t, filter.alpha(), filter.beta()))
        .fold(0.0, f64::max);
    let kp1 = k as f64 + 1.0;
    let mut bound = damping_factor(k_i, k, m) * j_star / (PI * (k_i as f64 + 1.0));
    if m > 0.0 {
        bound += m * filter.c_m()? * j_star / kp1 + m * PI * PI / (3.0 * kp1 * kp1);
    }
    Ok(bound)
}

const C_M_TOL: f64 = 1e-12;

/// `C_m = ∫_0^π (sin u)^{m-1} (sin u − u cos u) / u^{m+2} du` for `m > 0`.
///
/// The integrand tends to 1/3 at `u = 0` and behaves like `(π − u)^{m−1}`
/// at `u = π`. The left half is integrated directly; on the right half the
/// substitution `π − u = t^{1/m}` removes the endpoint singularity.
pub fn c_m_constant(m: f64) -> Result<f64> {
    c_m_with_tol(m, C_M_TOL)
}

pub(crate) fn c_m_with_tol(m: f64, tol: f64) -> Result<f64> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::config(format!("C_m requires m > 0, got {m}")));
    }
    let half = PI / 2.0;
    let left = adaptive_simpson(&|u| c_m_integrand(u, m), 0.0, half, tol / 2.0);
    let right_end = half.powf(m);
    let right = adaptive_simpson(
        &|t: f64| {
            let s = t.powf(1.0 / m);
            let u = PI - s;
            sinc(s).powf(m - 1.0) * (s.sin() + u * s.cos()) / u.powf(m + 2.0) / m
        },
        0.0,
        right_end,
        tol / 2.0,
    );
    Ok(left + right)
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `(sin u − u cos u) / u³`, by series near zero.
fn sin_minus_ucos_over_cube(u: f64) -> f64 {
    if u < 0.05 {
        let u2 = u * u;
        1.0 / 3.0 - u2 / 30.0 + u2 * u2 / 840.0 - u2 * u2 * u2 / 45360.0
    } else {
        (u.sin() - u * u.cos()) / (u * u * u)
    }
}

pub(crate) fn c_m_integrand(u: f64, m: f64) -> f64 {
    sinc(u).powf(m - 1.0) * sin_minus_ucos_over_cube(u)
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let mid = 0.5 * (a + b);
    let fm = f(mid);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let mid = 0.5 * (a + b);
    let lm = 0.5 * (a + mid);
    let rm = 0.5 * (mid + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (mid - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - mid) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, mid, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson_step(f, mid, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j_at_endpoints() {
        let (alpha, beta) = (2.0f64, 0.7f64);
        let expect = 1.0 / alpha.sin().abs()
            + 1.0 / ((alpha + beta) / 2.0).sin().abs()
            + 1.0 / ((alpha - beta) / 2.0).sin().abs();
        assert!((j_theta(alpha, alpha, beta) - expect).abs() <= 1e-14 * expect);
        let expect_b = 1.0 / beta.sin().abs()
            + 1.0 / ((alpha + beta) / 2.0).sin().abs()
            + 1.0 / ((alpha - beta) / 2.0).sin().abs();
        assert!((j_theta(beta, alpha, beta) - expect_b).abs() <= 1e-14 * expect_b);
    }

    #[test]
    fn j_plug_in_value() {
        let (alpha, beta, theta) = (2.0 * PI / 3.0, PI / 3.0, PI / 2.0);
        let expect = 1.0 / (7.0 * PI / 12.0).sin()
            + 1.0 / (PI / 12.0).sin()
            + 1.0 / (5.0 * PI / 12.0).sin()
            + 1.0 / (PI / 12.0).sin();
        assert!((j_theta(theta, alpha, beta) - expect).abs() < 1e-12);
    }

    #[test]
    fn j_far_field_estimate() {
        let (alpha, beta) = (2.3, 0.4);
        for i in 0..=1000 {
            let theta = PI * i as f64 / 1000.0;
            if theta == alpha || theta == beta {
                continue;
            }
            let d = [theta + alpha, theta - alpha, theta + beta, theta - beta]
                .iter()
                .map(|v| v.abs())
                .fold(f64::INFINITY, f64::min);
            assert!(j_theta(theta, alpha, beta) <= 4.0 * PI / d * (1.0 + 1e-12));
        }
    }

    #[test]
    fn j_singular_point_is_infinite() {
        assert!(j_theta(0.0, PI, 0.5).is_finite());
        assert!(j_theta(0.0, 0.9, 0.0).is_infinite());
    }

    #[test]
    fn c_m_positive_and_converged() {
        for m in [0.25, 0.5, 1.0, 1.5, 2.0, 3.0] {
            let v = c_m_constant(m).unwrap();
            assert!(v > 0.0, "C_{m} = {v}");
            let coarse = c_m_with_tol(m, 1e-10).unwrap();
            assert!((v - coarse).abs() < 1e-10);
        }
        assert!(c_m_constant(0.0).is_err());
        assert!(c_m_constant(-1.0).is_err());
    }

    #[test]
    fn c_1_matches_dense_trapezoid() {
        // m = 1: bounded integrand (sin u − u cos u)/u³ on (0, π).
        let n = 10_000_000usize;
        let h = PI / n as f64;
        let mut sum = 0.5 * (c_m_integrand(0.0, 1.0) + c_m_integrand(PI, 1.0));
        for i in 1..n {
            sum += c_m_integrand(i as f64 * h, 1.0);
        }
        let trap = sum * h;
        let v = c_m_constant(1.0).unwrap();
        assert!((v - trap).abs() < 1e-10, "{v} vs {trap}");
    }

    #[test]
    fn undamped_decreases_in_k() {
        let (alpha, beta) = (1.4706, 0.9273);
        let mut prev = f64::INFINITY;
        for k in [1, 2, 5, 10, 50, 100, 1000] {
            let b = undamped_bound(0.3, k, alpha, beta);
            assert!(b < prev);
            prev = b;
        }
    }

    #[test]
    fn undamped_far_field_chain() {
        let (alpha, beta) = (2.0f64, 1.0f64);
        let theta = 2.1; // d(θ) = 0.1
        for k in [1, 10, 100] {
            assert!(undamped_bound(theta, k, alpha, beta) <= 40.0 / (k as f64 + 1.0));
        }
    }

    #[test]
    fn damped_reduces_to_undamped_at_m_zero() {
        let (alpha, beta) = (1.4706, 0.9273);
        for (theta, k_i, k) in [(0.2, 5, 13), (1.2, 30, 75), (2.9, 1, 1)] {
            let d = damped_bound(theta, k_i, k, 0.0, alpha, beta).unwrap();
            assert_eq!(d, undamped_bound(theta, k_i, alpha, beta));
        }
        assert!(damped_bound(0.2, 0, 10, 0.5, alpha, beta).is_err());
        assert!(damped_bound(0.2, 11, 10, 0.5, alpha, beta).is_err());
    }
}
