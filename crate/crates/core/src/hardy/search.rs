use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mean::MeanSpec;
use crate::sampling::{log_uniform, trial_rng, w0_weights};
use crate::serde_ext::ext_real;
use crate::vectors::{check_len, EntryVector, WeightVector};

use super::ratio::{hardy_ratio_f64, hardy_sequence_f64};

/// Step size at the first iteration.
pub const INITIAL_STEP: f64 = 0.5;
/// Step size at the last iteration.
pub const FINAL_STEP: f64 = 0.005;
/// Allowed excess of an observed ratio over the sharp constant.
pub const MU1_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdversarialResult {
    pub initial_ratio: f64,
    pub best_ratio: f64,
    pub iterations: usize,
    pub accepted: usize,
    #[serde(skip)]
    pub best: Vec<f64>,
}

/// `x_k = 1 / Λ_k` for a finite weight prefix.
fn default_candidate(lambda: &[f64]) -> Vec<f64> {
    let mut s = crate::mean::CompensatedSum::new();
    let sums: Vec<f64> = lambda
        .iter()
        .map(|w| {
            s.add(*w);
            s.value()
        })
        .collect();
    hardy_sequence_f64(&sums, 1.0)
}

fn climb<R: Rng>(
    spec: &MeanSpec,
    lambda: &[f64],
    mut x: Vec<f64>,
    iterations: usize,
    rng: &mut R,
) -> AdversarialResult {
    let n = x.len();
    let initial_ratio = hardy_ratio_f64(spec, &x, lambda);
    let mut best = initial_ratio;
    let mut accepted = 0;
    let mut trial = x.clone();
    let decay = (FINAL_STEP / INITIAL_STEP).ln();
    for k in 0..iterations {
        let eps = INITIAL_STEP * (decay * k as f64 / iterations.max(1) as f64).exp();
        let start = (log_uniform(rng, 1.0, n as f64) as usize).clamp(1, n) - 1;
        let len = (log_uniform(rng, 1.0, (n - start) as f64) as usize).clamp(1, n - start);
        let factor = (eps * rng.random_range(-1.0..=1.0)).exp();
        trial[start..start + len]
            .iter_mut()
            .zip(&x[start..start + len])
            .for_each(|(t, v)| *t = v * factor);
        let r = hardy_ratio_f64(spec, &trial, lambda);
        if r > best && trial[start..start + len].iter().all(|v| v.is_finite() && *v > 0.0) {
            best = r;
            accepted += 1;
            x[start..start + len].copy_from_slice(&trial[start..start + len]);
        } else {
            trial[start..start + len].copy_from_slice(&x[start..start + len]);
        }
    }
    AdversarialResult {
        initial_ratio,
        best_ratio: best,
        iterations,
        accepted,
        best: x,
    }
}

/// Hill climb on multiplicative block perturbations of `candidate`
/// (default `x_k = 1/Λ_k`), maximizing the final finite Hardy ratio. Every
/// ratio found is a lower bound for the λ-Hardy constant.
pub fn adversarial_lower_bound(
    spec: &MeanSpec,
    lambda: &WeightVector,
    candidate: Option<&EntryVector>,
    iterations: usize,
    seed: u64,
) -> Result<AdversarialResult> {
    let ws = lambda.to_f64();
    if ws[0].is_nan() || ws[0] <= 0.0 {
        return Err(Error::FirstWeightNotPositive);
    }
    let x = match candidate {
        Some(c) => {
            check_len(c.len(), ws.len())?;
            c.to_f64()
        }
        None => default_candidate(&ws),
    };
    Ok(climb(spec, &ws, x, iterations, &mut trial_rng(seed, 0)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Mu1Report {
    pub spec: MeanSpec,
    pub samples: usize,
    pub n: usize,
    pub iterations: usize,
    pub seed: u64,
    /// Sharp constant for unit weights.
    #[serde(serialize_with = "ext_real")]
    pub bound: f64,
    pub max_ratio: f64,
    /// `bound − max_ratio`.
    #[serde(serialize_with = "ext_real")]
    pub sup_gap: f64,
    pub passed: bool,
    pub ratios: Vec<f64>,
}

/// Samples weight prefixes in `W⁰(Q)`, searches each for a large Hardy
/// ratio and compares the largest with the unit-weight constant.
pub fn mu1_sampling_check(
    spec: &MeanSpec,
    samples: usize,
    n: usize,
    iterations: usize,
    seed: u64,
) -> Result<Mu1Report> {
    if samples == 0 || n == 0 {
        return Err(Error::Empty);
    }
    let ratios: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let ws: Vec<f64> = w0_weights(&mut rng, n).iter().map(|r| r.to_f64()).collect();
            climb(spec, &ws, default_candidate(&ws), iterations, &mut rng).best_ratio
        })
        .collect();
    let max_ratio = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let bound = spec.hardy_constant();
    Ok(Mu1Report {
        spec: *spec,
        samples,
        n,
        iterations,
        seed,
        bound,
        max_ratio,
        sup_gap: bound - max_ratio,
        passed: max_ratio <= bound + MU1_SLACK,
        ratios,
    })
}
