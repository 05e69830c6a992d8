//! Seeded random streams and the entry/weight samplers shared by the
//! fuzz harnesses.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::numeric::Numeric;
use crate::rational::Rational;

/// Independent stream for trial `index` under `seed`. Results do not depend
/// on how trials are scheduled across threads.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Log-uniform sample in `[lo, hi]`.
pub fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    let (a, b) = (lo.ln(), hi.ln());
    rng.random_range(a..=b).exp().clamp(lo, hi)
}

/// Entries log-uniform in `[1e-3, 1e3]`.
pub fn entries_f64<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| log_uniform(rng, 1e-3, 1e3)).collect()
}

/// Positive rational `a/b` with `a ∈ [1, max_num]`, `b ∈ [1, max_den]`.
pub fn positive_rational<R: Rng>(rng: &mut R, max_num: i64, max_den: i64) -> Rational {
    Rational::new(rng.random_range(1..=max_num), rng.random_range(1..=max_den))
}

/// Nonnegative rational weight; zero with probability about `zero_prob`.
pub fn weight_rational<R: Rng>(rng: &mut R, zero_prob: f64, max_num: i64, max_den: i64) -> Rational {
    if rng.random_bool(zero_prob) {
        Rational::zero()
    } else {
        positive_rational(rng, max_num, max_den)
    }
}

/// Weights in `W⁰(Q)`: positive first weight, the rest nonnegative.
pub fn w0_weights<R: Rng>(rng: &mut R, n: usize) -> Vec<Rational> {
    let mut w = Vec::with_capacity(n);
    w.push(positive_rational(rng, 16, 16));
    for _ in 1..n {
        w.push(weight_rational(rng, 0.15, 16, 16));
    }
    w
}

/// Weights in `V(Q)`: draws ratios `1 = r_1 ≥ r_2 ≥ … > 0` with `r_k < 1`
/// for `k ≥ 2`, then solves `λ_k = r_k Λ_k` with `Λ_k = Λ_{k−1} / (1 − r_k)`.
pub fn v_weights<R: Rng>(rng: &mut R, n: usize) -> Vec<Rational> {
    const DEN: i64 = 16;
    let one = Rational::one();
    let mut lambda = Vec::with_capacity(n);
    let first = positive_rational(rng, 8, 4);
    let mut total = first.clone();
    lambda.push(first);
    let mut ratio = one.clone();
    for k in 1..n {
        // r_2 < 1 strictly, later factors may be 1 (ties are allowed)
        let hi = if k == 1 { DEN - 1 } else { DEN };
        let factor = Rational::new(rng.random_range(1..=hi), DEN);
        ratio = &ratio * &factor;
        total = &total / &(&one - &ratio);
        lambda.push(&ratio * &total);
    }
    lambda
}

pub fn to_numeric(v: Vec<Rational>) -> Vec<Numeric> {
    v.into_iter().map(Numeric::Exact).collect()
}

pub fn floats(v: &[f64]) -> Vec<Numeric> {
    v.iter().map(|&x| Numeric::Float(x)).collect()
}
