//! Deterministic inputs shared by the benchmarks.

use hardy_means_core::sampling::{entries_f64, trial_rng};

/// Log-uniform entries and unit-range weights of length `n`.
pub fn fixture(n: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = trial_rng(seed, 0);
    let x = entries_f64(&mut rng, n);
    let w = entries_f64(&mut rng, n).into_iter().map(|v| v / 1e3).collect();
    (x, w)
}
