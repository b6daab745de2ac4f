use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of an interior eigenvalue solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub interval_a: f64,
    pub interval_b: f64,
    /// Lock threshold: a pair is accepted once `‖Av − λv‖ < tau_c · ‖A‖`.
    pub tau_c: f64,
    /// Threshold of the adaptive degree rule.
    pub tau_a: f64,
    /// Lanczos damping exponent.
    pub m: f64,
    /// Constant of the initial degree rule.
    #[serde(rename = "C")]
    pub c: f64,
    /// The filter's maximum degree is `⌈k_multiplier · k1⌉`.
    pub k_multiplier: f64,
    /// Subspace oversampling factor.
    pub mu: f64,
    pub max_iter: usize,
    pub lanczos_steps: usize,
    pub trace_probes: usize,
    pub rng_seed: u64,
    /// Fixed subspace dimension; skips the eigenvalue count estimate.
    pub p_override: Option<usize>,
    pub tile_ti: Option<usize>,
    pub tile_tk: Option<usize>,
    /// Never restrict the convergence test to the checked set. Only useful
    /// for studying the effect of spurious Ritz values.
    #[serde(default)]
    pub disable_spurious_check: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            interval_a: 0.0,
            interval_b: 1.0,
            tau_c: 1e-10,
            tau_a: 1e-3,
            m: 0.5,
            c: 1.4,
            k_multiplier: 2.5,
            mu: 1.8,
            max_iter: 100,
            lanczos_steps: 40,
            trace_probes: 30,
            rng_seed: 0,
            p_override: None,
            tile_ti: None,
            tile_tk: None,
            disable_spurious_check: false,
        }
    }
}

impl SolverConfig {
    pub fn with_interval(a: f64, b: f64) -> Self {
        Self {
            interval_a: a,
            interval_b: b,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.interval_a,
            self.interval_b,
            self.tau_c,
            self.tau_a,
            self.m,
            self.c,
            self.k_multiplier,
            self.mu,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("solver parameters must be finite"));
        }
        if self.interval_a >= self.interval_b {
            return Err(Error::config(format!(
                "interval requires a < b, got [{}, {}]",
                self.interval_a, self.interval_b
            )));
        }
        if !(self.tau_c > 0.0 && self.tau_c < 1.0) {
            return Err(Error::config(format!("tau_c must lie in (0, 1), got {}", self.tau_c)));
        }
        if !(self.tau_a > 0.0 && self.tau_a < 1.0) {
            return Err(Error::config(format!("tau_a must lie in (0, 1), got {}", self.tau_a)));
        }
        if self.m < 0.0 {
            return Err(Error::config(format!("m must be >= 0, got {}", self.m)));
        }
        if self.c <= 0.0 {
            return Err(Error::config(format!("C must be > 0, got {}", self.c)));
        }
        if self.k_multiplier < 1.0 {
            return Err(Error::config(format!(
                "k_multiplier must be >= 1, got {}",
                self.k_multiplier
            )));
        }
        if self.mu < 1.0 {
            return Err(Error::config(format!("mu must be >= 1, got {}", self.mu)));
        }
        if self.max_iter == 0 {
            return Err(Error::config("max_iter must be at least 1"));
        }
        if self.lanczos_steps < 2 {
            return Err(Error::config("lanczos_steps must be at least 2"));
        }
        if self.trace_probes == 0 {
            return Err(Error::config("trace_probes must be at least 1"));
        }
        if self.p_override == Some(0) {
            return Err(Error::config("p_override must be at least 1"));
        }
        if self.tile_ti == Some(0) || self.tile_tk == Some(0) {
            return Err(Error::config("tile sizes must be at least 1"));
        }
        Ok(())
    }

    /// Applies one `key = value` setting, using the same names as the
    /// serialized form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::config(format!("invalid value {value:?} for {key}")))
        }
        fn opt(key: &str, value: &str) -> Result<Option<usize>> {
            if value.eq_ignore_ascii_case("none") || value.is_empty() {
                Ok(None)
            } else {
                num(key, value).map(Some)
            }
        }
        match key {
            "interval_a" => self.interval_a = num(key, value)?,
            "interval_b" => self.interval_b = num(key, value)?,
            "tau_c" => self.tau_c = num(key, value)?,
            "tau_a" => self.tau_a = num(key, value)?,
            "m" => self.m = num(key, value)?,
            "C" | "c" => self.c = num(key, value)?,
            "k_multiplier" => self.k_multiplier = num(key, value)?,
            "mu" => self.mu = num(key, value)?,
            "max_iter" => self.max_iter = num(key, value)?,
            "lanczos_steps" => self.lanczos_steps = num(key, value)?,
            "trace_probes" => self.trace_probes = num(key, value)?,
            "rng_seed" | "seed" => self.rng_seed = num(key, value)?,
            "p_override" => self.p_override = opt(key, value)?,
            "tile_ti" => self.tile_ti = opt(key, value)?,
            "tile_tk" => self.tile_tk = opt(key, value)?,
            "disable_spurious_check" => self.disable_spurious_check = num(key, value)?,
            _ => return Err(Error::config(format!("unknown configuration key {key:?}"))),
        }
        Ok(())
    }
}
