use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::Numeric;

/// Entries of a mean: a nonempty list of strictly positive scalars.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Numeric>", into = "Vec<Numeric>")]
pub struct EntryVector(Vec<Numeric>);

impl EntryVector {
    pub fn new(entries: Vec<Numeric>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Empty);
        }
        if let Some(index) = entries.iter().position(|x| !x.is_positive()) {
            return Err(Error::NonPositiveEntry { index });
        }
        Ok(EntryVector(entries))
    }

    pub fn from_f64(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| Numeric::float(x)).collect::<Result<_>>()?)
    }

    pub fn from_ints(entries: &[i64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| Numeric::int(x)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Numeric] {
        &self.0
    }

    pub fn get(&self, i: usize) -> &Numeric {
        &self.0[i]
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(Numeric::to_f64).collect()
    }

    pub fn is_exact(&self) -> bool {
        self.0.iter().all(Numeric::is_exact)
    }

    pub fn prefix(&self, k: usize) -> EntryVector {
        EntryVector(self.0[..k].to_vec())
    }

    pub fn into_inner(self) -> Vec<Numeric> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Numeric> {
        self.0.iter()
    }

    pub fn min(&self) -> &Numeric {
        self.0.iter().min_by(|a, b| a.cmp_exact(b)).expect("nonempty")
    }

    pub fn max(&self) -> &Numeric {
        self.0.iter().max_by(|a, b| a.cmp_exact(b)).expect("nonempty")
    }

    /// Multiply every entry by a positive scalar.
    pub fn scale(&self, c: &Numeric) -> Result<EntryVector> {
        EntryVector::new(self.0.iter().map(|x| x.mul(c)).collect())
    }
}

impl TryFrom<Vec<Numeric>> for EntryVector {
    type Error = Error;
    fn try_from(v: Vec<Numeric>) -> Result<Self> {
        EntryVector::new(v)
    }
}

impl From<EntryVector> for Vec<Numeric> {
    fn from(v: EntryVector) -> Self {
        v.0
    }
}

/// Weights: nonempty, each nonnegative, with positive sum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Numeric>", into = "Vec<Numeric>")]
pub struct WeightVector(Vec<Numeric>);

impl WeightVector {
    pub fn new(weights: Vec<Numeric>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Empty);
        }
        if let Some(index) = weights.iter().position(Numeric::is_negative) {
            return Err(Error::NegativeWeight { index });
        }
        if weights.iter().all(Numeric::is_zero) {
            return Err(Error::ZeroWeights);
        }
        Ok(WeightVector(weights))
    }

    pub fn from_f64(weights: &[f64]) -> Result<Self> {
        Self::new(weights.iter().map(|&x| Numeric::float(x)).collect::<Result<_>>()?)
    }

    pub fn from_ints(weights: &[i64]) -> Result<Self> {
        Self::new(weights.iter().map(|&x| Numeric::int(x)).collect())
    }

    /// `n` unit weights.
    pub fn ones(n: usize) -> Self {
        assert!(n > 0);
        WeightVector(vec![Numeric::one(); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Numeric] {
        &self.0
    }

    pub fn get(&self, i: usize) -> &Numeric {
        &self.0[i]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Numeric> {
        self.0.iter()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(Numeric::to_f64).collect()
    }

    pub fn is_exact(&self) -> bool {
        self.0.iter().all(Numeric::is_exact)
    }

    pub fn total(&self) -> Numeric {
        Numeric::sum(&self.0)
    }

    /// Running sums Λ_1, …, Λ_n.
    pub fn partial_sums(&self) -> Vec<Numeric> {
        let mut acc = Numeric::zero();
        self.0
            .iter()
            .map(|w| {
                acc = acc.add(w);
                acc.clone()
            })
            .collect()
    }

    /// The first `k` weights; fails when they are all zero.
    pub fn prefix(&self, k: usize) -> Result<WeightVector> {
        WeightVector::new(self.0[..k].to_vec())
    }

    pub fn scale(&self, t: &Numeric) -> Result<WeightVector> {
        WeightVector::new(self.0.iter().map(|w| w.mul(t)).collect())
    }

    pub fn add(&self, other: &WeightVector) -> Result<WeightVector> {
        check_len(self.len(), other.len())?;
        WeightVector::new(self.0.iter().zip(&other.0).map(|(a, b)| a.add(b)).collect())
    }

    pub fn into_inner(self) -> Vec<Numeric> {
        self.0
    }
}

impl TryFrom<Vec<Numeric>> for WeightVector {
    type Error = Error;
    fn try_from(v: Vec<Numeric>) -> Result<Self> {
        WeightVector::new(v)
    }
}

impl From<WeightVector> for Vec<Numeric> {
    fn from(v: WeightVector) -> Self {
        v.0
    }
}

pub(crate) fn check_len(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::LengthMismatch { left, right })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entry_validation() {
        assert_eq!(EntryVector::new(vec![]), Err(Error::Empty));
        assert_eq!(
            EntryVector::from_ints(&[1, 0, 2]),
            Err(Error::NonPositiveEntry { index: 1 })
        );
        assert!(EntryVector::from_f64(&[1e-300, 5.0]).is_ok());
    }

    #[test]
    fn weight_validation() {
        assert_eq!(WeightVector::from_ints(&[0, 0]), Err(Error::ZeroWeights));
        assert_eq!(
            WeightVector::from_ints(&[1, -1]),
            Err(Error::NegativeWeight { index: 1 })
        );
        let w = WeightVector::from_ints(&[0, 3, 1]).unwrap();
        assert_eq!(w.total(), Numeric::int(4));
        assert_eq!(
            w.partial_sums(),
            vec![Numeric::int(0), Numeric::int(3), Numeric::int(4)]
        );
        assert!(w.prefix(1).is_err());
    }

    #[test]
    fn serde_validates() {
        let bad: std::result::Result<EntryVector, _> = serde_json::from_str("[1, -2]");
        assert!(bad.is_err());
        let ok: WeightVector = serde_json::from_str(r#"["1/2", 3]"#).unwrap();
        assert_eq!(ok.get(0), &Numeric::ratio(1, 2));
    }
}
