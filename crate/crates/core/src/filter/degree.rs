//! Adaptive choice of the filter degree from the previous iteration's Ritz values.

use super::ChebFilter;
use crate::error::{Error, Result};

/// Lower limit applied to the adaptively chosen degree.
pub const MIN_ADAPTIVE_DEGREE: usize = 3;

/// Smallest degree `j` at which the filtered Ritz values, sorted by
/// magnitude, satisfy `|γ̂_p / γ̂_{e_i}| < tau_a`.
///
/// Returns `k_max` when no degree qualifies. The result is at least
/// [`MIN_ADAPTIVE_DEGREE`] (or `k_max` if that is smaller).
pub fn adaptive_degree(f: &ChebFilter, ritz: &[f64], e_i: usize, tau_a: f64) -> Result<usize> {
    if e_i == 0 || e_i > ritz.len() {
        return Err(Error::Contract(format!(
            "adaptive degree needs 1 <= e_i <= {} Ritz values, got e_i = {e_i}",
            ritz.len()
        )));
    }
    if !(tau_a > 0.0) {
        return Err(Error::config(format!("adaptive threshold must be positive, got {tau_a}")));
    }
    let floor = MIN_ADAPTIVE_DEGREE.min(f.k_max());
    let chosen = first_qualifying_degree(f, ritz, e_i, tau_a).unwrap_or(f.k_max());
    Ok(chosen.max(floor))
}

fn first_qualifying_degree(f: &ChebFilter, ritz: &[f64], e_i: usize, tau_a: f64) -> Option<usize> {
    let a = f.coeffs();
    let t: Vec<f64> = ritz
        .iter()
        .map(|&x| f.bounds().map(x).clamp(-1.0, 1.0))
        .collect();
    let mut h0 = vec![1.0; ritz.len()];
    let mut h1 = t.clone();
    let mut gamma: Vec<f64> = vec![a[0]; ritz.len()];
    let mut sorted = vec![0.0; ritz.len()];
    let p = ritz.len();
    for (j, &aj) in a.iter().enumerate().skip(1) {
        for (g, h) in gamma.iter_mut().zip(&h1) {
            *g += aj * h;
        }
        for (s, g) in sorted.iter_mut().zip(&gamma) {
            *s = g.abs();
        }
        sorted.sort_by(|x, y| y.total_cmp(x));
        if sorted[p - 1] / sorted[e_i - 1] < tau_a {
            return Some(j);
        }
        for i in 0..p {
            let next = 2.0 * t[i] * h1[i] - h0[i];
            h0[i] = h1[i];
            h1[i] = next;
        }
    }
    None
}
