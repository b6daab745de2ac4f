mod common;

use adapoly::rng::{generator, Stream};
use adapoly::{solve, SolverConfig};
use common::{dense_eig, gap_interval, random_sparse_symmetric, residual_norm};
use rand::Rng;

#[test]
fn matches_dense_oracle_on_random_problems() {
    let trials = 40;
    let mut exact = 0;
    for trial in 0..trials {
        let mut rng = generator(1000 + trial, Stream::Bench);
        let n = rng.random_range(120..=400);
        let a = random_sparse_symmetric(n, 6, 77 + trial);
        let eig = dense_eig(&a);
        let count = rng.random_range(1..=20);
        let lo = rng.random_range(0..n - count);
        let (ia, ib) = gap_interval(&eig.eigenvalues, lo, lo + count);
        let mut config = SolverConfig::with_interval(ia, ib);
        config.rng_seed = trial;
        let r = solve(&a, &config).unwrap();
        let norm = eig.eigenvalues[0].abs().max(eig.eigenvalues[n - 1].abs());
        // No spurious output: every returned value is within its residual of an oracle eigenvalue.
        for (i, &v) in r.eigenvalues.iter().enumerate() {
            let d = eig.eigenvalues.iter().map(|e| (e - v).abs()).fold(f64::INFINITY, f64::min);
            assert!(d <= r.residuals[i] * 1.000001 + 1e-14 * norm, "trial {trial}: {v} off by {d}");
            assert!(v >= ia && v <= ib);
            let col = r.eigenvectors.column(i);
            assert!(residual_norm(&a, &col, v) <= 2.0 * config.tau_c * r.bounds.norm_estimate());
        }
        let expected = &eig.eigenvalues[lo..lo + count];
        let ok = r.converged
            && r.eigenvalues.len() == count
            && r.eigenvalues.iter().zip(expected).all(|(x, y)| (x - y).abs() <= 1e-8 * norm);
        if ok {
            exact += 1;
        } else {
            eprintln!(
                "trial {trial}: n={n} count={count} got {} termination {:?} iters {}",
                r.eigenvalues.len(),
                r.termination,
                r.iterations
            );
        }
    }
    eprintln!("{exact}/{trials} exact");
    assert!(exact * 100 >= 95 * trials as usize);
}
