use std::sync::OnceLock;

use log::warn;
use serde::{Deserialize, Serialize};

use super::bounds::{c_m_constant, damped_bound_with_cm};
use super::coeffs::{chebyshev_step_coeffs, lanczos_damping};
use crate::error::{Error, Result};

/// Enclosure `[λ_min, λ_max]` of the spectrum and the affine map onto `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumBounds {
    pub lambda_min: f64,
    pub lambda_max: f64,
}

impl SpectrumBounds {
    pub fn new(lambda_min: f64, lambda_max: f64) -> Result<Self> {
        if !lambda_min.is_finite() || !lambda_max.is_finite() || lambda_min >= lambda_max {
            return Err(Error::config(format!(
                "invalid spectrum bounds [{lambda_min}, {lambda_max}]"
            )));
        }
        Ok(Self {
            lambda_min,
            lambda_max,
        })
    }

    /// Slope `l_1` of the map `l(x) = l_1 x + l_2`.
    pub fn l1(&self) -> f64 {
        2.0 / (self.lambda_max - self.lambda_min)
    }

    pub fn l2(&self) -> f64 {
        -(self.lambda_max + self.lambda_min) / (self.lambda_max - self.lambda_min)
    }

    pub fn map(&self, x: f64) -> f64 {
        self.l1() * x + self.l2()
    }

    /// `max(|λ_min|, |λ_max|)`, the matrix norm estimate used for residual tests.
    pub fn norm_estimate(&self) -> f64 {
        self.lambda_min.abs().max(self.lambda_max.abs())
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lambda_min && x <= self.lambda_max
    }
}

/// Damped Chebyshev filter for a target interval.
///
/// Coefficients are fixed for the maximum degree `k_max`; evaluation at a
/// lower degree truncates the series but keeps the damping computed for
/// `k_max`.
#[derive(Debug, Clone)]
pub struct ChebFilter {
    interval_a: f64,
    interval_b: f64,
    bounds: SpectrumBounds,
    alpha: f64,
    beta: f64,
    k_max: usize,
    m: f64,
    coeffs: Vec<f64>,
    c_m: OnceLock<f64>,
}

/// Builds the filter for `[a, b]` inside `bounds` at maximum degree `k`.
pub fn build_filter(a: f64, b: f64, bounds: SpectrumBounds, k: usize, m: f64) -> Result<ChebFilter> {
    if !(a < b) {
        return Err(Error::config(format!("interval requires a < b, got [{a}, {b}]")));
    }
    if a < bounds.lambda_min || b > bounds.lambda_max {
        return Err(Error::config(format!(
            "interval [{a}, {b}] is not inside the spectrum bounds [{}, {}]",
            bounds.lambda_min, bounds.lambda_max
        )));
    }
    if k < 1 {
        return Err(Error::config("filter degree must be at least 1"));
    }
    let alpha = bounds.map(a).clamp(-1.0, 1.0).acos();
    let beta = bounds.map(b).clamp(-1.0, 1.0).acos();
    let damping = lanczos_damping(k, m)?;
    let coeffs = chebyshev_step_coeffs(alpha, beta, k)
        .into_iter()
        .zip(damping)
        .map(|(c, d)| c * d)
        .collect();
    Ok(ChebFilter {
        interval_a: a,
        interval_b: b,
        bounds,
        alpha,
        beta,
        k_max: k,
        m,
        coeffs,
        c_m: OnceLock::new(),
    })
}

/// Starting degree `⌈C / (α − β)⌉ − 1`, at least 1.
pub fn initial_degree(alpha: f64, beta: f64, c: f64) -> Result<usize> {
    let width = alpha - beta;
    if !(width > 0.0) {
        return Err(Error::config(format!("need alpha > beta, got {alpha} <= {beta}")));
    }
    if !(c > width) {
        return Err(Error::config(format!(
            "degree constant C = {c} must exceed alpha - beta = {width}"
        )));
    }
    let k = (c / width).ceil() as usize - 1;
    Ok(k.max(1))
}

impl ChebFilter {
    pub fn interval(&self) -> (f64, f64) {
        (self.interval_a, self.interval_b)
    }

    pub fn bounds(&self) -> SpectrumBounds {
        self.bounds
    }

    /// Angle of the left endpoint, `arccos(l(a))`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Angle of the right endpoint, `arccos(l(b))`.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    /// Damped coefficients `a_j = c_j d_j`, `j = 0..=k_max`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn l1(&self) -> f64 {
        self.bounds.l1()
    }

    pub fn l2(&self) -> f64 {
        self.bounds.l2()
    }

    fn check_degree(&self, degree: usize) -> Result<()> {
        if degree > self.k_max {
            return Err(Error::config(format!(
                "degree {degree} exceeds the filter's maximum {}",
                self.k_max
            )));
        }
        Ok(())
    }

    /// Maps `x` to `[-1, 1]`, clamping values that fall outside the enclosure.
    fn mapped(&self, x: f64) -> (f64, bool) {
        let t = self.bounds.map(x);
        if t.abs() > 1.0 {
            (t.clamp(-1.0, 1.0), true)
        } else {
            (t, false)
        }
    }

    /// `ρ(x)` at degree `degree` for every entry of `xs`, by forward
    /// three-term recurrence on the mapped arguments.
    pub fn eval_scalar(&self, xs: &[f64], degree: usize) -> Result<Vec<f64>> {
        self.check_degree(degree)?;
        let mut clamped = 0usize;
        let out = xs
            .iter()
            .map(|&x| {
                let (t, was_clamped) = self.mapped(x);
                clamped += was_clamped as usize;
                self.eval_mapped(t, degree)
            })
            .collect();
        if clamped > 0 {
            warn!("{clamped} filter argument(s) outside the spectrum bounds were clamped");
        }
        Ok(out)
    }

    /// Series value at an already mapped argument `t ∈ [-1, 1]`.
    pub(crate) fn eval_mapped(&self, t: f64, degree: usize) -> f64 {
        let a = &self.coeffs;
        let mut sum = a[0];
        if degree == 0 {
            return sum;
        }
        let (mut t_prev, mut t_cur) = (1.0, t);
        sum += a[1] * t_cur;
        for &aj in &a[2..=degree] {
            let t_next = 2.0 * t * t_cur - t_prev;
            t_prev = t_cur;
            t_cur = t_next;
            sum += aj * t_cur;
        }
        sum
    }

    /// The constant `C_m`, computed once per filter.
    pub fn c_m(&self) -> Result<f64> {
        if let Some(v) = self.c_m.get() {
            return Ok(*v);
        }
        let v = c_m_constant(self.m)?;
        Ok(*self.c_m.get_or_init(|| v))
    }

    /// Pointwise error bound for this filter at angle `theta` and degree `k_i`.
    pub fn damped_bound(&self, theta: f64, k_i: usize) -> Result<f64> {
        let cm = if self.m > 0.0 { self.c_m()? } else { 0.0 };
        damped_bound_with_cm(theta, k_i, self.k_max, self.m, self.alpha, self.beta, cm)
    }

    /// Angle `arccos(l(x))` of a point in original coordinates.
    pub fn theta_of(&self, x: f64) -> f64 {
        self.mapped(x).0.acos()
    }

    /// Exact step function: 1 inside `(a, b)`, 1/2 at the endpoints, 0 outside.
    pub fn step(&self, x: f64) -> f64 {
        if x == self.interval_a || x == self.interval_b {
            0.5
        } else if x > self.interval_a && x < self.interval_b {
            1.0
        } else {
            0.0
        }
    }
}

/// Free-function form of [`ChebFilter::eval_scalar`].
pub fn eval_filter_scalar(f: &ChebFilter, xs: &[f64], degree: usize) -> Result<Vec<f64>> {
    f.eval_scalar(xs, degree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit() -> SpectrumBounds {
        SpectrumBounds::new(-1.0, 1.0).unwrap()
    }

    #[test]
    fn bounds_map_endpoints() {
        let b = SpectrumBounds::new(2.0, 6.0).unwrap();
        assert_eq!(b.map(2.0), -1.0);
        assert_eq!(b.map(6.0), 1.0);
        assert_eq!(b.map(4.0), 0.0);
        assert!(SpectrumBounds::new(1.0, 1.0).is_err());
    }

    #[test]
    fn full_interval_filter_is_one() {
        let b = SpectrumBounds::new(-3.0, 5.0).unwrap();
        let f = build_filter(-3.0, 5.0, b, 30, 0.5).unwrap();
        assert_eq!(f.coeffs()[0], 1.0);
        let xs: Vec<f64> = (0..=16).map(|i| -3.0 + 0.5 * i as f64).collect();
        assert!(f.eval_scalar(&xs, 30).unwrap().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn coefficient_invariants() {
        let f = build_filter(0.1, 0.6, unit(), 100, 0.5).unwrap();
        assert!(f.beta() < f.alpha() && f.alpha() <= PI && f.beta() >= 0.0);
        assert_eq!(f.coeffs()[0], (f.alpha() - f.beta()) / PI);
        assert_eq!(f.coeffs().len(), 101);
    }

    #[test]
    fn undamped_filter_is_truncated_series() {
        let f = build_filter(0.1, 0.6, unit(), 40, 0.0).unwrap();
        let c = chebyshev_step_coeffs(f.alpha(), f.beta(), 40);
        for i in 0..=20 {
            let x = -1.0 + 0.1 * i as f64;
            let theta = x.clamp(-1.0, 1.0).acos();
            let direct: f64 = c.iter().enumerate().map(|(j, cj)| cj * (j as f64 * theta).cos()).sum();
            let v = f.eval_scalar(&[x], 40).unwrap()[0];
            assert!((v - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn degree_one_is_affine() {
        let f = build_filter(0.1, 0.6, unit(), 10, 0.5).unwrap();
        let a = f.coeffs();
        for x in [-0.7, 0.0, 0.35, 0.9] {
            let v = f.eval_scalar(&[x], 1).unwrap()[0];
            assert!((v - (a[0] + a[1] * x)).abs() < 1e-15);
        }
    }

    #[test]
    fn midpoint_converges_towards_one() {
        let f = build_filter(0.1, 0.6, unit(), 200, 0.0).unwrap();
        let v = f.eval_scalar(&[0.35], 200).unwrap()[0];
        assert!((v - 1.0).abs() < 0.05);
    }

    #[test]
    fn symmetric_filter_is_even() {
        let f = build_filter(-0.3, 0.3, unit(), 60, 1.0).unwrap();
        for i in 0..50 {
            let x = i as f64 / 50.0;
            let v = f.eval_scalar(&[x, -x], 60).unwrap();
            assert!((v[0] - v[1]).abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_bad_configuration() {
        assert!(build_filter(0.6, 0.1, unit(), 10, 0.5).is_err());
        assert!(build_filter(-2.0, 0.1, unit(), 10, 0.5).is_err());
        assert!(build_filter(0.1, 0.6, unit(), 0, 0.5).is_err());
        assert!(build_filter(0.1, 0.6, unit(), 10, -1.0).is_err());
        let f = build_filter(0.1, 0.6, unit(), 10, 0.5).unwrap();
        assert!(f.eval_scalar(&[0.0], 11).is_err());
    }

    #[test]
    fn out_of_range_arguments_are_clamped() {
        let f = build_filter(0.1, 0.6, unit(), 10, 0.5).unwrap();
        let v = f.eval_scalar(&[1.5, 1.0], 10).unwrap();
        assert_eq!(v[0], v[1]);
    }

    #[test]
    fn initial_degree_examples() {
        assert_eq!(initial_degree(1.0, 0.5, 1.0).unwrap(), 1);
        assert_eq!(initial_degree(0.2, 0.0, 1.4).unwrap(), 6);
        let (alpha, beta) = (0.1f64.acos(), 0.6f64.acos());
        assert_eq!(initial_degree(alpha, beta, 1.4).unwrap(), 2);
        assert!(initial_degree(alpha, beta, 0.5).is_err());
        assert!(initial_degree(0.5, 0.5, 1.4).is_err());
    }
}
