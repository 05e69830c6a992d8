use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::mean::CompensatedSum;

/// Infinite weight sequences `λ_1, λ_2, …` with `λ_1 > 0`, all terms `≥ 0`.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightFamily {
    /// `λ_n = c`.
    Constant(f64),
    /// `λ_n = 1/n`.
    Harmonic,
    /// `λ_n = n^α`.
    PowerLaw(f64),
    /// `λ_n = r^n`, `0 < r < 1`.
    Geometric(f64),
    /// Listed terms, then a constant tail equal to the last listed term.
    Explicit(Vec<f64>),
}

impl WeightFamily {
    pub fn constant(c: f64) -> Result<Self> {
        if c.is_finite() && c > 0.0 {
            Ok(WeightFamily::Constant(c))
        } else {
            Err(Error::InvalidArgument(format!(
                "constant weight must be positive, got {c}"
            )))
        }
    }

    pub fn power_law(alpha: f64) -> Result<Self> {
        if alpha.is_finite() {
            Ok(WeightFamily::PowerLaw(alpha))
        } else {
            Err(Error::InvalidArgument("power-law exponent must be finite".into()))
        }
    }

    pub fn geometric(r: f64) -> Result<Self> {
        if r > 0.0 && r < 1.0 {
            Ok(WeightFamily::Geometric(r))
        } else {
            Err(Error::InvalidArgument(format!(
                "geometric ratio must lie in (0, 1), got {r}"
            )))
        }
    }

    pub fn explicit(terms: Vec<f64>) -> Result<Self> {
        match terms.first() {
            None => return Err(Error::Empty),
            Some(&t) if t.is_nan() || t <= 0.0 => return Err(Error::FirstWeightNotPositive),
            _ => {}
        }
        if let Some(index) = terms.iter().position(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::NegativeWeight { index });
        }
        Ok(WeightFamily::Explicit(terms))
    }

    /// The unit sequence `(1, 1, 1, …)`.
    pub fn ones() -> Self {
        WeightFamily::Constant(1.0)
    }

    /// `λ_n`, one-based.
    pub fn term(&self, n: usize) -> f64 {
        debug_assert!(n >= 1);
        match self {
            WeightFamily::Constant(c) => *c,
            WeightFamily::Harmonic => 1.0 / n as f64,
            WeightFamily::PowerLaw(a) => (n as f64).powf(*a),
            WeightFamily::Geometric(r) => r.powi(n.min(i32::MAX as usize) as i32),
            WeightFamily::Explicit(t) => t[(n - 1).min(t.len() - 1)],
        }
    }

    /// `(λ_1, …, λ_len)`.
    pub fn terms(&self, len: usize) -> Vec<f64> {
        (1..=len).map(|n| self.term(n)).collect()
    }

    /// `(Λ_1, …, Λ_len)` with compensated summation.
    pub fn partial_sums(&self, len: usize) -> Vec<f64> {
        let mut s = CompensatedSum::new();
        (1..=len)
            .map(|n| {
                s.add(self.term(n));
                s.value()
            })
            .collect()
    }

    /// Whether `Σ λ_n = ∞`, from the closed form of the family.
    pub fn is_divergent(&self) -> bool {
        match self {
            WeightFamily::Constant(_) | WeightFamily::Harmonic => true,
            WeightFamily::PowerLaw(a) => *a >= -1.0,
            WeightFamily::Geometric(_) => false,
            WeightFamily::Explicit(t) => *t.last().expect("nonempty") > 0.0,
        }
    }

    /// Whether the divergence flag is known in closed form (all but
    /// explicit lists).
    pub fn is_catalog(&self) -> bool {
        !matches!(self, WeightFamily::Explicit(_))
    }

    /// Whether the sequence `λ_n / Λ_n` is nonincreasing, from the closed
    /// form where one is known.
    pub fn in_v(&self) -> Option<bool> {
        match self {
            WeightFamily::Constant(_)
            | WeightFamily::Harmonic
            | WeightFamily::PowerLaw(_)
            | WeightFamily::Geometric(_) => Some(true),
            WeightFamily::Explicit(_) => None,
        }
    }
}

impl FromStr for WeightFamily {
    type Err = Error;

    /// `const:<c>`, `harmonic`, `powerlaw:<alpha>`, `geom:<r>`,
    /// `explicit:<comma list>`; numbers may be fractions.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let num = |t: &str| -> Result<f64> {
            let t = t.trim();
            if let Ok(r) = t.parse::<crate::rational::Rational>() {
                return Ok(r.to_f64());
            }
            t.parse::<f64>()
                .map_err(|_| Error::Parse(format!("not a number: {t:?}")))
        };
        let reparse = |e: Error| match e {
            Error::Parse(_) => e,
            other => Error::Parse(other.to_string()),
        };
        if s == "harmonic" {
            return Ok(WeightFamily::Harmonic);
        }
        if let Some(c) = s.strip_prefix("const:") {
            return WeightFamily::constant(num(c)?).map_err(reparse);
        }
        if let Some(a) = s.strip_prefix("powerlaw:") {
            return WeightFamily::power_law(num(a)?).map_err(reparse);
        }
        if let Some(r) = s.strip_prefix("geom:") {
            return WeightFamily::geometric(num(r)?).map_err(reparse);
        }
        if let Some(list) = s.strip_prefix("explicit:") {
            let terms = list
                .split(',')
                .filter(|t| !t.trim().is_empty())
                .map(num)
                .collect::<Result<Vec<_>>>()?;
            return WeightFamily::explicit(terms).map_err(reparse);
        }
        Err(Error::Parse(format!("unknown weight family: {s:?}")))
    }
}

impl fmt::Display for WeightFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightFamily::Constant(c) => write!(f, "const:{c}"),
            WeightFamily::Harmonic => write!(f, "harmonic"),
            WeightFamily::PowerLaw(a) => write!(f, "powerlaw:{a}"),
            WeightFamily::Geometric(r) => write!(f, "geom:{r}"),
            WeightFamily::Explicit(t) => {
                let items: Vec<String> = t.iter().map(|v| v.to_string()).collect();
                write!(f, "explicit:{}", items.join(","))
            }
        }
    }
}

impl Serialize for WeightFamily {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
