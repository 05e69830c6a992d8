//! Exact-or-float scalars.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A scalar that is either an exact rational or a finite binary64 value.
/// Arithmetic between the two promotes to `Float`.
#[derive(Clone, PartialEq)]
pub enum Numeric {
    Exact(Rational),
    Float(f64),
}

impl Numeric {
    pub fn float(value: f64) -> Result<Self> {
        if value.is_finite() {
            Ok(Numeric::Float(value))
        } else {
            Err(Error::NonFinite)
        }
    }

    pub fn exact(value: Rational) -> Self {
        Numeric::Exact(value)
    }

    pub fn int(n: i64) -> Self {
        Numeric::Exact(Rational::from_integer(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Numeric::Exact(Rational::new(n, d))
    }

    pub fn zero() -> Self {
        Numeric::int(0)
    }

    pub fn one() -> Self {
        Numeric::int(1)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Numeric::Exact(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Numeric::Exact(r) => r.to_f64(),
            Numeric::Float(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Numeric::Exact(r) => Some(r),
            Numeric::Float(_) => None,
        }
    }

    /// The exact rational value; binary64 values convert without rounding.
    pub fn to_rational(&self) -> Rational {
        match self {
            Numeric::Exact(r) => r.clone(),
            Numeric::Float(x) => Rational::from_f64(*x).expect("Float is finite by construction"),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Numeric::Exact(r) => r.is_zero(),
            Numeric::Float(x) => *x == 0.0,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Numeric::Exact(r) => r.is_positive(),
            Numeric::Float(x) => *x > 0.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Numeric::Exact(r) => r.is_negative(),
            Numeric::Float(x) => *x < 0.0,
        }
    }

    fn combine(
        &self,
        other: &Numeric,
        exact: impl FnOnce(&Rational, &Rational) -> Rational,
        float: impl FnOnce(f64, f64) -> f64,
    ) -> Numeric {
        match (self, other) {
            (Numeric::Exact(a), Numeric::Exact(b)) => Numeric::Exact(exact(a, b)),
            _ => Numeric::Float(float(self.to_f64(), other.to_f64())),
        }
    }

    pub fn add(&self, other: &Numeric) -> Numeric {
        self.combine(other, |a, b| a + b, |a, b| a + b)
    }

    pub fn sub(&self, other: &Numeric) -> Numeric {
        self.combine(other, |a, b| a - b, |a, b| a - b)
    }

    pub fn mul(&self, other: &Numeric) -> Numeric {
        self.combine(other, |a, b| a * b, |a, b| a * b)
    }

    /// Division; the caller guarantees a nonzero divisor.
    pub fn div(&self, other: &Numeric) -> Numeric {
        debug_assert!(!other.is_zero());
        self.combine(other, |a, b| a / b, |a, b| a / b)
    }

    pub fn abs(&self) -> Numeric {
        match self {
            Numeric::Exact(r) => Numeric::Exact(r.abs()),
            Numeric::Float(x) => Numeric::Float(x.abs()),
        }
    }

    /// Total order; exact and float values are compared exactly.
    pub fn cmp_exact(&self, other: &Numeric) -> Ordering {
        match (self, other) {
            (Numeric::Exact(a), Numeric::Exact(b)) => a.cmp(b),
            (Numeric::Float(a), Numeric::Float(b)) => a.total_cmp(b),
            (Numeric::Exact(a), Numeric::Float(b)) => a.partial_cmp(b).expect("Float is finite by construction"),
            (Numeric::Float(a), Numeric::Exact(b)) => {
                b.partial_cmp(a).expect("Float is finite by construction").reverse()
            }
        }
    }

    pub fn min(self, other: Numeric) -> Numeric {
        if other.cmp_exact(&self) == Ordering::Less {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Numeric) -> Numeric {
        if other.cmp_exact(&self) == Ordering::Greater {
            other
        } else {
            self
        }
    }

    pub fn sum<'a>(items: impl IntoIterator<Item = &'a Numeric>) -> Numeric {
        items.into_iter().fold(Numeric::zero(), |acc, x| acc.add(x))
    }
}

impl PartialOrd for Numeric {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_exact(other))
    }
}

impl From<Rational> for Numeric {
    fn from(value: Rational) -> Self {
        Numeric::Exact(value)
    }
}

impl From<i64> for Numeric {
    fn from(value: i64) -> Self {
        Numeric::int(value)
    }
}

impl TryFrom<f64> for Numeric {
    type Error = Error;
    fn try_from(value: f64) -> Result<Self> {
        Numeric::float(value)
    }
}

/// Shortest round-trip text for `x`, in scientific notation outside
/// `[1e-4, 1e16)`. Non-finite values print as `inf`, `-inf` and `NaN`.
pub fn format_f64(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Exact values print as `num/den`; floats as [`format_f64`].
impl fmt::Display for Numeric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Numeric::Exact(r) => write!(f, "{r}"),
            Numeric::Float(x) => f.write_str(&format_f64(*x)),
        }
    }
}

impl fmt::Debug for Numeric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Numeric::Exact(r) => write!(f, "Exact({r})"),
            Numeric::Float(x) => write!(f, "Float({x:?})"),
        }
    }
}

/// Integers, fractions and plain decimals parse as exact; anything carrying
/// an exponent parses as a float.
impl FromStr for Numeric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Ok(r) = s.parse::<Rational>() {
            return Ok(Numeric::Exact(r));
        }
        let x: f64 = s.parse().map_err(|_| Error::Parse(format!("not a number: {s:?}")))?;
        Numeric::float(x).map_err(|_| Error::Parse(format!("not a finite number: {s:?}")))
    }
}

/// Serialized as a JSON number for floats and a fraction string for exact
/// values.
impl Serialize for Numeric {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Numeric::Exact(r) => serializer.serialize_str(&r.to_string()),
            Numeric::Float(x) => serializer.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for Numeric {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Num(x) => Numeric::float(x).map_err(serde::de::Error::custom),
            Repr::Text(s) => s
                .parse::<Rational>()
                .map(Numeric::Exact)
                .map_err(serde::de::Error::custom),
        }
    }
}

/// Parse a comma-separated list of scalars.
pub fn parse_list(s: &str) -> Result<Vec<Numeric>> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(str::parse).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn promotion() {
        let a = Numeric::ratio(1, 2);
        let b = Numeric::float(0.25).unwrap();
        assert_eq!(a.add(&b), Numeric::Float(0.75));
        assert_eq!(a.add(&Numeric::ratio(1, 3)), Numeric::ratio(5, 6));
    }

    #[test]
    fn rejects_non_finite() {
        assert!(Numeric::float(f64::INFINITY).is_err());
        assert!(Numeric::float(f64::NAN).is_err());
        assert!("inf".parse::<Numeric>().is_err());
    }

    #[test]
    fn mixed_comparison_is_exact() {
        let third = Numeric::ratio(1, 3);
        let approx = Numeric::float(1.0 / 3.0).unwrap();
        assert_ne!(third.cmp_exact(&approx), Ordering::Equal);
        assert_eq!(Numeric::ratio(1, 2).cmp_exact(&Numeric::Float(0.5)), Ordering::Equal);
    }

    #[test]
    fn parse_and_print() {
        assert_eq!("3/6".parse::<Numeric>().unwrap().to_string(), "1/2");
        assert_eq!(format_f64(2.0), "2");
        assert_eq!(format_f64(1.25e-10), "1.25e-10");
        assert_eq!(format_f64(3e20), "3e20");
        assert_eq!(format_f64(f64::INFINITY), "inf");
        assert_eq!("1e-3".parse::<Numeric>().unwrap(), Numeric::Float(1e-3));
        assert_eq!(parse_list("1, 7,1/2").unwrap().len(), 3);
    }

    #[test]
    fn json_forms() {
        let v = vec![Numeric::ratio(5, 2), Numeric::Float(0.5)];
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"["5/2",0.5]"#);
        let back: Vec<Numeric> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }
}
