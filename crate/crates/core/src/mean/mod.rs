//! Weighted means on `(0, ∞)`.

mod accumulator;
mod spec;

pub use accumulator::{CompensatedSum, MeanAccumulator, GEOMETRIC_CUTOFF};
pub use spec::{Generator, MeanSpec};

use crate::error::{Error, Result};
use crate::numeric::Numeric;
use crate::rational::Rational;
use crate::vectors::{check_len, EntryVector, WeightVector};

/// `M(x, λ)` for a catalog mean.
///
/// Exact inputs stay exact for the arithmetic mean, the minimum and the
/// maximum; every other combination is evaluated in binary64.
pub fn eval_mean(spec: &MeanSpec, x: &EntryVector, weights: &WeightVector) -> Result<Numeric> {
    check_len(x.len(), weights.len())?;
    if spec.supports_exact() && x.is_exact() && weights.is_exact() {
        return Ok(Numeric::Exact(eval_exact(spec, x, weights)));
    }
    let xs = x.to_f64();
    let ws = weights.to_f64();
    let v = eval_mean_f64(spec, &xs, &ws)?;
    Numeric::float(v)
}

fn eval_exact(spec: &MeanSpec, x: &EntryVector, weights: &WeightVector) -> Rational {
    let pairs = x
        .iter()
        .zip(weights.iter())
        .filter(|(_, w)| !w.is_zero())
        .map(|(x, w)| (x.to_rational(), w.to_rational()));
    match *spec {
        MeanSpec::Power(1.0) => {
            let (num, den) = pairs.fold((Rational::zero(), Rational::zero()), |(n, d), (x, w)| {
                (n + &(&w * &x), d + w)
            });
            num / den
        }
        MeanSpec::Power(p) if p == f64::NEG_INFINITY => pairs.map(|(x, _)| x).min().expect("positive total weight"),
        MeanSpec::Power(p) if p == f64::INFINITY => pairs.map(|(x, _)| x).max().expect("positive total weight"),
        _ => unreachable!("spec without exact evaluation"),
    }
}

/// Binary64 evaluation on raw slices. Entries must be positive, weights
/// nonnegative with positive sum.
pub fn eval_mean_f64(spec: &MeanSpec, x: &[f64], weights: &[f64]) -> Result<f64> {
    check_len(x.len(), weights.len())?;
    let mut acc = MeanAccumulator::new(spec);
    for (&x, &w) in x.iter().zip(weights) {
        acc.push(x, w);
    }
    match acc.value() {
        Some(v) if v.is_finite() => Ok(v),
        Some(_) => Err(Error::NonFinite),
        None => Err(Error::ZeroWeights),
    }
}

/// A non-weighted mean `M(x_1, …, x_n)`.
pub trait UnweightedMean {
    fn eval_unweighted(&self, x: &[Numeric]) -> Result<Numeric>;
}

/// The non-weighted restriction `x ↦ M(x, (1, …, 1))` of a weighted mean.
impl UnweightedMean for MeanSpec {
    fn eval_unweighted(&self, x: &[Numeric]) -> Result<Numeric> {
        let x = EntryVector::new(x.to_vec())?;
        eval_mean(self, &x, &WeightVector::ones(x.len()))
    }
}

impl<F> UnweightedMean for F
where
    F: Fn(&[Numeric]) -> Result<Numeric>,
{
    fn eval_unweighted(&self, x: &[Numeric]) -> Result<Numeric> {
        self(x)
    }
}
