use serde::Serialize;

use crate::error::{Error, Result};
use crate::mean::{CompensatedSum, MeanAccumulator, MeanSpec};
use crate::vectors::{check_len, EntryVector, WeightVector};

use super::WeightFamily;

/// Partial sums of both sides of the weighted Hardy inequality.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HardyRatioTrace {
    /// `Σ_{n≤N} λ_n · M((x_1..x_n), (λ_1..λ_n))`.
    pub partial_numerators: Vec<f64>,
    /// `Σ_{n≤N} λ_n x_n`.
    pub partial_denominators: Vec<f64>,
    pub ratios: Vec<f64>,
}

impl HardyRatioTrace {
    pub fn final_ratio(&self) -> f64 {
        *self.ratios.last().expect("nonempty trace")
    }

    pub fn max_ratio(&self) -> f64 {
        self.ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

fn check_prefix(x: &[f64], lambda: &[f64]) -> Result<()> {
    check_len(x.len(), lambda.len())?;
    match lambda.first() {
        None => Err(Error::Empty),
        Some(&w) if w > 0.0 => Ok(()),
        Some(_) => Err(Error::FirstWeightNotPositive),
    }
}

/// Every finite ratio is a lower bound for the λ-Hardy constant of `spec`.
pub fn hardy_partial_ratio(spec: &MeanSpec, x: &EntryVector, lambda: &WeightVector) -> Result<HardyRatioTrace> {
    let xs = x.to_f64();
    let ws = lambda.to_f64();
    check_prefix(&xs, &ws)?;
    let n = xs.len();
    let mut trace = HardyRatioTrace {
        partial_numerators: Vec::with_capacity(n),
        partial_denominators: Vec::with_capacity(n),
        ratios: Vec::with_capacity(n),
    };
    let mut acc = MeanAccumulator::new(spec);
    let mut num = CompensatedSum::new();
    let mut den = CompensatedSum::new();
    for (&xi, &wi) in xs.iter().zip(&ws) {
        acc.push(xi, wi);
        let m = acc.value().expect("first weight positive");
        num.add(wi * m);
        den.add(wi * xi);
        trace.partial_numerators.push(num.value());
        trace.partial_denominators.push(den.value());
        trace.ratios.push(num.value() / den.value());
    }
    Ok(trace)
}

/// Final ratio only, without allocating the trace. Inputs are assumed
/// valid (positive entries, nonnegative weights, positive first weight).
pub fn hardy_ratio_f64(spec: &MeanSpec, x: &[f64], lambda: &[f64]) -> f64 {
    let mut acc = MeanAccumulator::new(spec);
    let mut num = CompensatedSum::new();
    let mut den = CompensatedSum::new();
    for (&xi, &wi) in x.iter().zip(lambda) {
        if wi == 0.0 {
            continue;
        }
        acc.push(xi, wi);
        num.add(wi * acc.value().expect("positive weight pushed"));
        den.add(wi * xi);
    }
    num.value() / den.value()
}

/// The test sequence `x_k = y / Λ_k`, `k = 1..len`.
pub fn hardy_sequence(family: &WeightFamily, y: f64, len: usize) -> Result<EntryVector> {
    if !(y > 0.0 && y.is_finite()) {
        return Err(Error::InvalidArgument(format!("y must be positive, got {y}")));
    }
    if len == 0 {
        return Err(Error::Empty);
    }
    EntryVector::from_f64(&hardy_sequence_f64(&family.partial_sums(len), y))
}

pub(crate) fn hardy_sequence_f64(partial_sums: &[f64], y: f64) -> Vec<f64> {
    partial_sums.iter().map(|s| y / s).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_ratio_is_at_most_one() {
        let x = EntryVector::from_f64(&[3.0, 1.0, 2.0, 0.5]).unwrap();
        let w = WeightVector::from_f64(&[1.0, 2.0, 0.5, 1.0]).unwrap();
        let t = hardy_partial_ratio(&MeanSpec::min(), &x, &w).unwrap();
        assert!(t.ratios.iter().all(|r| *r <= 1.0));
        let dec = EntryVector::from_f64(&[3.0, 2.0, 1.0, 0.5]).unwrap();
        let t = hardy_partial_ratio(&MeanSpec::min(), &dec, &w).unwrap();
        assert!(t.ratios.iter().all(|r| *r == 1.0));
    }

    #[test]
    fn single_term() {
        let t = hardy_partial_ratio(
            &MeanSpec::arithmetic(),
            &EntryVector::from_f64(&[2.0]).unwrap(),
            &WeightVector::ones(1),
        )
        .unwrap();
        assert_eq!(t.ratios, vec![1.0]);
    }

    #[test]
    fn square_root_mean_on_harmonic_sequence() {
        let n = 10_000;
        let x = hardy_sequence(&WeightFamily::ones(), 1.0, n).unwrap();
        let t = hardy_partial_ratio(&MeanSpec::Power(0.5), &x, &WeightVector::ones(n)).unwrap();
        assert!(t.max_ratio() < 4.0);
        assert!(t.ratios.windows(2).all(|w| w[1] >= w[0]));
        assert_eq!(
            t.final_ratio(),
            hardy_ratio_f64(&MeanSpec::Power(0.5), &x.to_f64(), &vec![1.0; n])
        );
    }

    #[test]
    fn sequences() {
        let s = hardy_sequence(&WeightFamily::ones(), 1.0, 3).unwrap().to_f64();
        assert_eq!(s, vec![1.0, 0.5, 1.0 / 3.0]);
        let s = hardy_sequence(&WeightFamily::Constant(2.0), 1.0, 3).unwrap().to_f64();
        assert_eq!(s, vec![0.5, 0.25, 1.0 / 6.0]);
        let s = hardy_sequence(&WeightFamily::Geometric(0.5), 1.0, 3).unwrap().to_f64();
        assert_eq!(s, vec![2.0, 4.0 / 3.0, 8.0 / 7.0]);
        assert!(hardy_sequence(&WeightFamily::ones(), 0.0, 3).is_err());
    }

    #[test]
    fn rejects_bad_prefix() {
        let x = EntryVector::from_f64(&[1.0, 2.0]).unwrap();
        let w = WeightVector::from_f64(&[0.0, 1.0]).unwrap();
        assert_eq!(
            hardy_partial_ratio(&MeanSpec::geometric(), &x, &w),
            Err(Error::FirstWeightNotPositive)
        );
    }
}
