//! The weighted Kedlaya inequality
//! `A_k(M_{i≤k}(x_i, λ_i), λ_k) ≤ M_k(A_{i≤k}(x_i, λ_i), λ_k)`,
//! membership in the weight class `V`, and a seeded violation search.

use std::cmp::Ordering;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mean::{eval_mean, MeanAccumulator, MeanSpec};
use crate::numeric::Numeric;
use crate::rational::Rational;
use crate::sampling;
use crate::vectors::{check_len, EntryVector, WeightVector};

/// Normalized gaps below `-KEDLAYA_SLACK` count as violations.
pub const KEDLAYA_SLACK: f64 = 1e-12;

/// One instance of the inequality. The first weight is strictly positive.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KedlayaInstance {
    pub spec: MeanSpec,
    pub x: EntryVector,
    pub lambda: WeightVector,
}

impl KedlayaInstance {
    pub fn new(spec: MeanSpec, x: EntryVector, lambda: WeightVector) -> Result<Self> {
        check_len(x.len(), lambda.len())?;
        if !lambda.get(0).is_positive() {
            return Err(Error::FirstWeightNotPositive);
        }
        Ok(KedlayaInstance { spec, x, lambda })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

fn require_w0(x: &EntryVector, lambda: &WeightVector) -> Result<()> {
    check_len(x.len(), lambda.len())?;
    if lambda.get(0).is_positive() {
        Ok(())
    } else {
        Err(Error::FirstWeightNotPositive)
    }
}

/// Prefix means `M((x_1..x_k), (λ_1..λ_k))` for `k = 1..n`.
pub fn partial_means(spec: &MeanSpec, x: &EntryVector, lambda: &WeightVector) -> Result<Vec<Numeric>> {
    require_w0(x, lambda)?;
    if spec.supports_exact() && x.is_exact() && lambda.is_exact() {
        return (1..=x.len())
            .map(|k| eval_mean(spec, &x.prefix(k), &lambda.prefix(k)?))
            .collect();
    }
    let mut acc = MeanAccumulator::new(spec);
    x.iter()
        .zip(lambda.iter())
        .map(|(xi, wi)| {
            acc.push(xi.to_f64(), wi.to_f64());
            Numeric::float(acc.value().expect("first weight positive"))
        })
        .collect()
}

/// Prefix weighted arithmetic means `(Σ_{i≤k} λ_i x_i) / Λ_k`.
pub fn partial_arithmetic_means(x: &EntryVector, lambda: &WeightVector) -> Result<Vec<Numeric>> {
    partial_means(&MeanSpec::arithmetic(), x, lambda)
}

/// `RHS − LHS` of the weighted Kedlaya inequality; nonnegative iff the
/// inequality holds for this instance.
pub fn kedlaya_gap(instance: &KedlayaInstance) -> Result<Numeric> {
    let KedlayaInstance { spec, x, lambda } = instance;
    let prefix_m = EntryVector::new(partial_means(spec, x, lambda)?)?;
    let prefix_a = EntryVector::new(partial_arithmetic_means(x, lambda)?)?;
    let lhs = eval_mean(&MeanSpec::arithmetic(), &prefix_m, lambda)?;
    let rhs = eval_mean(spec, &prefix_a, lambda)?;
    Ok(rhs.sub(&lhs))
}

/// Ratios `λ_i / Λ_i` and whether they are nonincreasing (ties allowed).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VMembership {
    pub ratios: Vec<Numeric>,
    pub is_member: bool,
}

pub fn is_in_v(lambda: &[Numeric]) -> Result<VMembership> {
    match lambda.first() {
        Some(first) if first.is_positive() => {}
        Some(_) => return Err(Error::FirstWeightNotPositive),
        None => return Err(Error::Empty),
    }
    if let Some(index) = lambda.iter().position(Numeric::is_negative) {
        return Err(Error::NegativeWeight { index });
    }
    let mut total = Numeric::zero();
    let ratios: Vec<Numeric> = lambda
        .iter()
        .map(|w| {
            total = total.add(w);
            w.div(&total)
        })
        .collect();
    let is_member = ratios.windows(2).all(|p| p[1].cmp_exact(&p[0]) != Ordering::Greater);
    Ok(VMembership { ratios, is_member })
}

/// Weight distribution for [`fuzz_kedlaya`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WeightMode {
    /// Constructed members of `V(Q)`.
    #[serde(rename = "v")]
    VOnly,
    /// Arbitrary rational weights with positive first member.
    #[serde(rename = "w0")]
    W0,
}

impl std::str::FromStr for WeightMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "v" | "v-only" => Ok(WeightMode::VOnly),
            "w0" => Ok(WeightMode::W0),
            _ => Err(Error::Parse(format!("unknown weight mode {s:?}"))),
        }
    }
}

/// Result of a violation search. `min_gap` is the smallest gap divided by
/// `max(x)` of its instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KedlayaReport {
    pub spec: MeanSpec,
    pub mode: WeightMode,
    pub seed: u64,
    pub n_max: usize,
    pub trials: u64,
    pub min_gap: f64,
    pub violations: u64,
    pub worst_instance: Option<KedlayaInstance>,
}

/// The random instance drawn for `trial`: length in `1..=n_max`, entries
/// log-uniform in `[1e-3, 1e3]`, weights per `mode`.
pub fn sample_kedlaya_instance(
    spec: &MeanSpec,
    n_max: usize,
    mode: WeightMode,
    seed: u64,
    trial: u64,
) -> KedlayaInstance {
    let mut rng = sampling::trial_rng(seed, trial);
    let n = rng.random_range(1..=n_max);
    let entries = sampling::entries_f64(&mut rng, n);
    let weights: Vec<Rational> = match mode {
        WeightMode::VOnly => sampling::v_weights(&mut rng, n),
        WeightMode::W0 => sampling::w0_weights(&mut rng, n),
    };
    let exact = spec.supports_exact();
    let x = entries
        .iter()
        .map(|&v| {
            if exact {
                Numeric::Exact(Rational::from_f64(v).expect("finite"))
            } else {
                Numeric::Float(v)
            }
        })
        .collect();
    let lambda = weights
        .into_iter()
        .map(|r| {
            if exact {
                Numeric::Exact(r)
            } else {
                Numeric::Float(r.to_f64())
            }
        })
        .collect();
    KedlayaInstance {
        spec: *spec,
        x: EntryVector::new(x).expect("positive entries"),
        lambda: WeightVector::new(lambda).expect("positive first weight"),
    }
}

/// Gap divided by `max(x)`.
pub fn normalized_gap(instance: &KedlayaInstance) -> Result<f64> {
    let gap = kedlaya_gap(instance)?;
    Ok(gap.div(instance.x.max()).to_f64())
}

/// Seeded search over `trials` random instances. Trials are independent
/// and run in parallel; the report does not depend on the thread count.
pub fn fuzz_kedlaya(spec: &MeanSpec, n_max: usize, trials: u64, mode: WeightMode, seed: u64) -> Result<KedlayaReport> {
    if n_max < 2 {
        return Err(Error::InvalidArgument("n_max must be at least 2".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    // (min gap, trial index of the min, violation count)
    let (min_gap, worst, violations) = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<(f64, u64, u64)> {
            let inst = sample_kedlaya_instance(spec, n_max, mode, seed, t);
            let g = normalized_gap(&inst)?;
            Ok((g, t, u64::from(g < -KEDLAYA_SLACK)))
        })
        .try_reduce(
            || (f64::INFINITY, u64::MAX, 0),
            |a, b| {
                let keep_a = a.0 < b.0 || (a.0 == b.0 && a.1 < b.1);
                let (g, i) = if keep_a { (a.0, a.1) } else { (b.0, b.1) };
                Ok((g, i, a.2 + b.2))
            },
        )?;
    Ok(KedlayaReport {
        spec: *spec,
        mode,
        seed,
        n_max,
        trials,
        min_gap,
        violations,
        worst_instance: Some(sample_kedlaya_instance(spec, n_max, mode, seed, worst)),
    })
}
