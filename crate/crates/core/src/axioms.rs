//! The defining properties of weighted means as executable checks, and the
//! correspondence between repetition-invariant means and integer weights.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mean::{eval_mean, MeanSpec, UnweightedMean};
use crate::numeric::Numeric;
use crate::rational::Rational;
use crate::sampling;
use crate::vectors::{check_len, EntryVector, WeightVector};

/// Relative tolerance for float-mode equality checks.
pub const FLOAT_RTOL: f64 = 1e-9;

/// Outcome of a single property check.
///
/// For equalities `abs_gap = |lhs − rhs|`; for inequalities `lhs ≤ rhs` it
/// is the signed margin `rhs − lhs` (negative on failure). `rel_gap` divides
/// by the larger magnitude.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub passed: bool,
    pub abs_gap: f64,
    pub rel_gap: f64,
    pub exact: bool,
}

impl CheckResult {
    pub fn equal(lhs: &Numeric, rhs: &Numeric, rtol: f64) -> Self {
        if let (Numeric::Exact(a), Numeric::Exact(b)) = (lhs, rhs) {
            let diff = (a - b).abs();
            let scale = a.abs().max(b.abs());
            let rel = if scale.is_zero() {
                0.0
            } else {
                (&diff / &scale).to_f64()
            };
            return CheckResult {
                passed: diff.is_zero(),
                abs_gap: diff.to_f64(),
                rel_gap: rel,
                exact: true,
            };
        }
        let (a, b) = (lhs.to_f64(), rhs.to_f64());
        let diff = (a - b).abs();
        let scale = a.abs().max(b.abs());
        let rel = if scale == 0.0 { 0.0 } else { diff / scale };
        CheckResult {
            passed: diff <= rtol * scale,
            abs_gap: diff,
            rel_gap: rel,
            exact: false,
        }
    }

    /// `lhs ≤ rhs + slack`.
    pub fn at_most(lhs: f64, rhs: f64, slack: f64) -> Self {
        let margin = rhs - lhs;
        let scale = lhs.abs().max(rhs.abs());
        CheckResult {
            passed: margin >= -slack,
            abs_gap: margin,
            rel_gap: if scale == 0.0 { 0.0 } else { margin / scale },
            exact: false,
        }
    }

    /// Exact `lhs ≤ rhs`.
    pub fn at_most_exact(lhs: &Rational, rhs: &Rational) -> Self {
        let margin = rhs - lhs;
        let scale = lhs.abs().max(rhs.abs());
        CheckResult {
            passed: !margin.is_negative(),
            abs_gap: margin.to_f64(),
            rel_gap: if scale.is_zero() {
                0.0
            } else {
                (&margin / &scale).to_f64()
            },
            exact: true,
        }
    }

    pub fn pass() -> Self {
        CheckResult {
            passed: true,
            abs_gap: 0.0,
            rel_gap: 0.0,
            exact: true,
        }
    }

    pub fn fail() -> Self {
        CheckResult {
            passed: false,
            abs_gap: f64::NAN,
            rel_gap: f64::NAN,
            exact: true,
        }
    }

    /// Combine two results: passes iff both pass, keeps the worse gap.
    pub fn and(self, other: CheckResult) -> CheckResult {
        let worse = if other.abs_gap.abs() > self.abs_gap.abs() || !other.passed {
            &other
        } else {
            &self
        };
        CheckResult {
            passed: self.passed && other.passed,
            abs_gap: worse.abs_gap,
            rel_gap: worse.rel_gap,
            exact: self.exact && other.exact,
        }
    }
}

/// Interleave `(p₁, q₁, p₂, q₂, …)`.
pub fn shuffle<T: Clone>(p: &[T], q: &[T]) -> Result<Vec<T>> {
    check_len(p.len(), q.len())?;
    Ok(p.iter().zip(q).flat_map(|(a, b)| [a.clone(), b.clone()]).collect())
}

/// `M(x, λ) = M(x, t·λ)`.
pub fn check_nullhomogeneity(
    spec: &MeanSpec,
    x: &EntryVector,
    weights: &WeightVector,
    t: &Numeric,
) -> Result<CheckResult> {
    if !t.is_positive() {
        return Err(Error::InvalidArgument("scaling factor must be positive".into()));
    }
    let lhs = eval_mean(spec, x, weights)?;
    let rhs = eval_mean(spec, x, &weights.scale(t)?)?;
    Ok(CheckResult::equal(&lhs, &rhs, FLOAT_RTOL))
}

/// `M(x, λ + μ) = M(x ⊙ x, λ ⊙ μ)`.
pub fn check_reduction(
    spec: &MeanSpec,
    x: &EntryVector,
    lambda: &WeightVector,
    mu: &WeightVector,
) -> Result<CheckResult> {
    check_len(x.len(), lambda.len())?;
    let lhs = eval_mean(spec, x, &lambda.add(mu)?)?;
    let xx = EntryVector::new(shuffle(x.as_slice(), x.as_slice())?)?;
    let lm = WeightVector::new(shuffle(lambda.as_slice(), mu.as_slice())?)?;
    let rhs = eval_mean(spec, &xx, &lm)?;
    Ok(CheckResult::equal(&lhs, &rhs, FLOAT_RTOL))
}

/// `min x ≤ M(x, λ) ≤ max x`.
pub fn check_mean_value(spec: &MeanSpec, x: &EntryVector, weights: &WeightVector) -> Result<CheckResult> {
    let m = eval_mean(spec, x, weights)?;
    let lo = x.min();
    let hi = x.max();
    let ok = m.cmp_exact(lo) != Ordering::Less && m.cmp_exact(hi) != Ordering::Greater;
    let lo_gap = m.sub(lo).to_f64();
    let hi_gap = hi.sub(&m).to_f64();
    let margin = lo_gap.min(hi_gap);
    let scale = hi.to_f64();
    Ok(CheckResult {
        passed: ok,
        abs_gap: margin,
        rel_gap: margin / scale,
        exact: m.is_exact(),
    })
}

/// `M(x, λ)` equals the mean with entry `j` removed, given `λ_j = 0`.
/// `j` is zero-based.
pub fn check_elimination(spec: &MeanSpec, x: &EntryVector, weights: &WeightVector, j: usize) -> Result<CheckResult> {
    check_len(x.len(), weights.len())?;
    let n = x.len();
    if n < 2 {
        return Err(Error::TooShort);
    }
    if j >= n {
        return Err(Error::IndexOutOfRange { index: j, len: n });
    }
    if !weights.get(j).is_zero() {
        return Err(Error::WeightNotZero { index: j });
    }
    let keep = |v: &[Numeric]| -> Vec<Numeric> {
        v.iter()
            .enumerate()
            .filter(|(i, _)| *i != j)
            .map(|(_, v)| v.clone())
            .collect()
    };
    let lhs = eval_mean(spec, x, weights)?;
    let rhs = eval_mean(
        spec,
        &EntryVector::new(keep(x.as_slice()))?,
        &WeightVector::new(keep(weights.as_slice()))?,
    )?;
    Ok(CheckResult::equal(&lhs, &rhs, FLOAT_RTOL))
}

/// Upper bound on the multiset size built by [`lift_to_weighted`].
pub const MAX_REPETITIONS: u128 = 1 << 24;

fn integer_weights(weights: &WeightVector) -> Result<Vec<u64>> {
    weights
        .iter()
        .enumerate()
        .map(|(index, w)| {
            let r = w.to_rational();
            if !r.is_integer() {
                return Err(Error::NonIntegerWeight { index });
            }
            r.numer().to_u64().ok_or(Error::TooManyRepetitions(u128::MAX))
        })
        .collect()
}

/// Integer-weighted mean induced by a repetition-invariant base mean: each
/// `x_i` repeated `λ_i` times, zero-weight entries dropped.
pub fn lift_to_weighted<B: UnweightedMean + ?Sized>(
    base: &B,
    x: &EntryVector,
    weights: &WeightVector,
) -> Result<Numeric> {
    check_len(x.len(), weights.len())?;
    let counts = integer_weights(weights)?;
    let total: u128 = counts.iter().map(|&c| c as u128).sum();
    if total > MAX_REPETITIONS {
        return Err(Error::TooManyRepetitions(total));
    }
    let mut multiset = Vec::with_capacity(total as usize);
    for (xi, &c) in x.iter().zip(&counts) {
        multiset.extend(std::iter::repeat_n(xi.clone(), c as usize));
    }
    base.eval_unweighted(&multiset)
}

/// Non-weighted mean recovered from a weighted one with unit weights.
pub fn project_to_unweighted(spec: &MeanSpec, x: &EntryVector) -> Result<Numeric> {
    eval_mean(spec, x, &WeightVector::ones(x.len()))
}

/// Multiply rational weights by the least common multiple of their
/// denominators, giving the proportional integer weight vector.
pub fn clear_denominators(weights: &WeightVector) -> Result<WeightVector> {
    let rationals: Vec<Rational> = weights
        .iter()
        .enumerate()
        .map(|(index, w)| w.as_exact().cloned().ok_or(Error::NonRationalWeight { index }))
        .collect::<Result<_>>()?;
    let lcm = rationals.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let scale = Rational::from_bigints(lcm, BigInt::one());
    WeightVector::new(rationals.iter().map(|r| Numeric::Exact(r * &scale)).collect())
}

/// Rational-weight evaluation through the integer weights obtained by
/// clearing denominators (nullhomogeneity makes the result independent of
/// the common factor).
pub fn extend_weights_to_rationals(spec: &MeanSpec, x: &EntryVector, weights: &WeightVector) -> Result<Numeric> {
    check_len(x.len(), weights.len())?;
    eval_mean(spec, x, &clear_denominators(weights)?)
}

/// The unique rational-weight extension of a lifted repetition-invariant
/// mean.
pub fn extend_lifted<B: UnweightedMean + ?Sized>(base: &B, x: &EntryVector, weights: &WeightVector) -> Result<Numeric> {
    lift_to_weighted(base, x, &clear_denominators(weights)?)
}

/// Whether a fuzz run draws exact rationals or binary64 values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleMode {
    Exact,
    Float,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct AxiomTally {
    pub checked: u64,
    pub failures: u64,
    pub worst_rel_gap: f64,
}

impl AxiomTally {
    fn record(&mut self, r: &CheckResult) {
        self.checked += 1;
        if !r.passed {
            self.failures += 1;
        }
        let g = r.rel_gap.abs();
        if g > self.worst_rel_gap || g.is_nan() {
            self.worst_rel_gap = g;
        }
    }

    fn merge(mut self, other: AxiomTally) -> AxiomTally {
        self.checked += other.checked;
        self.failures += other.failures;
        self.worst_rel_gap = self.worst_rel_gap.max(other.worst_rel_gap);
        self
    }
}

/// Tallies of the four axiom checks over a random batch.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxiomReport {
    pub spec: MeanSpec,
    pub mode: SampleMode,
    pub trials: u64,
    pub seed: u64,
    pub nullhomogeneity: AxiomTally,
    pub reduction: AxiomTally,
    pub mean_value: AxiomTally,
    pub elimination: AxiomTally,
}

impl AxiomReport {
    pub fn failures(&self) -> u64 {
        self.nullhomogeneity.failures + self.reduction.failures + self.mean_value.failures + self.elimination.failures
    }
}

struct AxiomInstance {
    x: EntryVector,
    lambda: WeightVector,
    mu: WeightVector,
    t: Numeric,
    with_zero: WeightVector,
    zero_index: usize,
}

fn sample_instance<R: Rng>(rng: &mut R, mode: SampleMode, n_max: usize) -> AxiomInstance {
    let n = rng.random_range(2..=n_max);
    let zero_index = rng.random_range(0..n);
    loop {
        let (x, lambda, mu, t): (Vec<Numeric>, Vec<Numeric>, Vec<Numeric>, Numeric) = match mode {
            SampleMode::Exact => (
                (0..n)
                    .map(|_| Numeric::Exact(sampling::positive_rational(rng, 100, 20)))
                    .collect(),
                (0..n)
                    .map(|_| Numeric::Exact(sampling::weight_rational(rng, 0.2, 10, 10)))
                    .collect(),
                (0..n)
                    .map(|_| Numeric::Exact(sampling::weight_rational(rng, 0.2, 10, 10)))
                    .collect(),
                Numeric::Exact(sampling::positive_rational(rng, 50, 50)),
            ),
            SampleMode::Float => {
                let mut w = || {
                    if rng.random_bool(0.2) {
                        0.0
                    } else {
                        rng.random_range(1e-3..1.0)
                    }
                };
                let lambda: Vec<f64> = (0..n).map(|_| w()).collect();
                let mu: Vec<f64> = (0..n).map(|_| w()).collect();
                (
                    sampling::floats(&sampling::entries_f64(rng, n)),
                    sampling::floats(&lambda),
                    sampling::floats(&mu),
                    Numeric::Float(sampling::log_uniform(rng, 1e-3, 1e3)),
                )
            }
        };
        let mut zeroed = lambda.clone();
        zeroed[zero_index] = Numeric::zero();
        let (Ok(lambda), Ok(mu), Ok(with_zero)) = (
            WeightVector::new(lambda),
            WeightVector::new(mu),
            WeightVector::new(zeroed),
        ) else {
            continue;
        };
        return AxiomInstance {
            x: EntryVector::new(x).expect("positive entries"),
            lambda,
            mu,
            t,
            with_zero,
            zero_index,
        };
    }
}

/// Run every axiom check on `trials` random instances of length `2..=n_max`.
pub fn fuzz_axioms(spec: &MeanSpec, mode: SampleMode, trials: u64, n_max: usize, seed: u64) -> Result<AxiomReport> {
    if n_max < 2 {
        return Err(Error::InvalidArgument("n_max must be at least 2".into()));
    }
    type Tallies = (AxiomTally, AxiomTally, AxiomTally, AxiomTally);
    let (nh, red, mv, el): Tallies = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<Tallies> {
            let mut rng = sampling::trial_rng(seed, i);
            let inst = sample_instance(&mut rng, mode, n_max);
            let mut t = Tallies::default();
            t.0.record(&check_nullhomogeneity(spec, &inst.x, &inst.lambda, &inst.t)?);
            t.1.record(&check_reduction(spec, &inst.x, &inst.lambda, &inst.mu)?);
            t.2.record(&check_mean_value(spec, &inst.x, &inst.lambda)?);
            t.3.record(&check_elimination(spec, &inst.x, &inst.with_zero, inst.zero_index)?);
            Ok(t)
        })
        .try_reduce(Tallies::default, |a, b| {
            Ok((a.0.merge(b.0), a.1.merge(b.1), a.2.merge(b.2), a.3.merge(b.3)))
        })?;
    Ok(AxiomReport {
        spec: *spec,
        mode,
        trials,
        seed,
        nullhomogeneity: nh,
        reduction: red,
        mean_value: mv,
        elimination: el,
    })
}
