use std::f64::consts::PI;

use adapoly::filter::{build_filter, undamped_bound, SpectrumBounds};

fn unit() -> SpectrumBounds {
    SpectrumBounds::new(-1.0, 1.0).unwrap()
}

/// θ samples on [0, π] avoiding `1e-3` neighbourhoods of the endpoint angles.
fn thetas(alpha: f64, beta: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| PI * (i as f64 + 0.5) / count as f64)
        .filter(|t| (t - alpha).abs() > 1e-3 && (t - beta).abs() > 1e-3)
        .collect()
}

#[test]
fn undamped_bound_holds() {
    for (a, b) in [(0.1, 0.6), (-0.8, -0.2), (-0.05, 0.9)] {
        for k in [5, 20, 100] {
            let f = build_filter(a, b, unit(), k, 0.0).unwrap();
            for theta in thetas(f.alpha(), f.beta(), 10_000) {
                let x = theta.cos();
                let err = (f.step(x) - f.eval_scalar(&[x], k).unwrap()[0]).abs();
                let bound = undamped_bound(theta, k, f.alpha(), f.beta());
                assert!(err <= bound, "[{a},{b}] k={k} θ={theta}: {err} > {bound}");
            }
        }
    }
}

#[test]
fn damped_bound_holds_over_degrees_and_exponents() {
    for (a, b) in [(0.1, 0.6), (-0.7, 0.3)] {
        for m in [0.5, 1.0, 2.0] {
            for k_i in [10, 40] {
                for k in [k_i, (2.5 * k_i as f64).ceil() as usize, 100.max(k_i)] {
                    let f = build_filter(a, b, unit(), k, m).unwrap();
                    for theta in thetas(f.alpha(), f.beta(), 2_000) {
                        let x = theta.cos();
                        let err = (f.step(x) - f.eval_scalar(&[x], k_i).unwrap()[0]).abs();
                        let bound = f.damped_bound(theta, k_i).unwrap();
                        assert!(err <= bound, "m={m} k_i={k_i} k={k} θ={theta}: {err} > {bound}");
                    }
                }
            }
        }
    }
}

#[test]
fn damped_bound_decays_with_degree() {
    let x = 0.0;
    let bound_at = |k_i: usize| {
        let f = build_filter(0.1, 0.6, unit(), (2.5 * k_i as f64).ceil() as usize, 0.5).unwrap();
        f.damped_bound(f.theta_of(x), k_i).unwrap()
    };
    let ratio = bound_at(80) / bound_at(10);
    assert!(ratio <= 0.25, "ratio {ratio}");
}
