use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Closed-form generators `f` of quasi-arithmetic means
/// `f⁻¹(Σ λ_i f(x_i) / Σ λ_i)` on `(0, ∞)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Generator {
    /// `f(x) = x^q`, `q ≠ 0`.
    Power(f64),
    /// `f(x) = ln x`.
    Log,
    /// `f(x) = e^x`.
    Exp,
}

impl Generator {
    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            Generator::Power(q) => x.powf(q),
            Generator::Log => x.ln(),
            Generator::Exp => x.exp(),
        }
    }

    pub fn inverse(&self, y: f64) -> f64 {
        match *self {
            Generator::Power(q) => y.powf(1.0 / q),
            Generator::Log => y.exp(),
            Generator::Exp => y.ln(),
        }
    }
}

/// A concrete weighted mean on `(0, ∞)`.
///
/// `Power(1)`, `Power(0)`, `Power(-∞)` and `Power(+∞)` are the arithmetic,
/// geometric, minimum and maximum means; the named constructors produce
/// exactly these canonical forms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MeanSpec {
    Power(f64),
    QuasiArithmetic(Generator),
}

impl MeanSpec {
    pub fn power(p: f64) -> Result<Self> {
        if p.is_nan() {
            return Err(Error::InvalidArgument("power exponent is NaN".into()));
        }
        // -0.0 and 0.0 are the same mean
        Ok(MeanSpec::Power(if p == 0.0 { 0.0 } else { p }))
    }

    pub fn arithmetic() -> Self {
        MeanSpec::Power(1.0)
    }

    pub fn geometric() -> Self {
        MeanSpec::Power(0.0)
    }

    pub fn min() -> Self {
        MeanSpec::Power(f64::NEG_INFINITY)
    }

    pub fn max() -> Self {
        MeanSpec::Power(f64::INFINITY)
    }

    pub fn quasi_arithmetic(generator: Generator) -> Result<Self> {
        match generator {
            Generator::Power(q) if q == 0.0 || !q.is_finite() => Err(Error::InvalidArgument(format!(
                "power generator exponent must be finite and nonzero, got {q}"
            ))),
            g => Ok(MeanSpec::QuasiArithmetic(g)),
        }
    }

    /// Exponent of the power mean this spec coincides with, if any.
    pub fn power_exponent(&self) -> Option<f64> {
        match *self {
            MeanSpec::Power(p) => Some(p),
            MeanSpec::QuasiArithmetic(Generator::Power(q)) => Some(q),
            MeanSpec::QuasiArithmetic(Generator::Log) => Some(0.0),
            MeanSpec::QuasiArithmetic(Generator::Exp) => None,
        }
    }

    /// Positive homogeneity `M(c·x, λ) = c·M(x, λ)`.
    pub fn is_homogeneous(&self) -> bool {
        self.power_exponent().is_some()
    }

    /// Means that map rational inputs to rational outputs and are computed
    /// exactly when all inputs are exact.
    pub fn supports_exact(&self) -> bool {
        matches!(self, MeanSpec::Power(p) if *p == 1.0 || p.is_infinite())
    }

    /// Jensen concavity; the hypothesis of the weighted Kedlaya theorem.
    pub fn is_jensen_concave(&self) -> bool {
        matches!(self.power_exponent(), Some(p) if p <= 1.0)
    }

    /// Sharp Hardy constant with unit weights, from the closed form for
    /// power means. The exponential quasi-arithmetic mean dominates the
    /// arithmetic mean, so its constant is infinite.
    pub fn hardy_constant(&self) -> f64 {
        match self.power_exponent() {
            Some(p) => crate::hardy::closed_form_c(p),
            None => f64::INFINITY,
        }
    }
}

fn parse_ext_real(s: &str) -> Result<f64> {
    let t = s.trim();
    match t {
        "inf" | "+inf" | "infinity" | "+infinity" => return Ok(f64::INFINITY),
        "-inf" | "-infinity" => return Ok(f64::NEG_INFINITY),
        _ => {}
    }
    if let Ok(r) = t.parse::<crate::rational::Rational>() {
        return Ok(r.to_f64());
    }
    match t.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(Error::Parse(format!("not an extended real: {s:?}"))),
    }
}

fn fmt_ext_real(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

/// `power:<p>` (`p` may be `inf`, `-inf` or a fraction), `qa:log`, `qa:exp`,
/// `qa:pow:<q>`. The names `arithmetic`, `geometric`, `min` and `max` are
/// accepted as aliases.
impl FromStr for MeanSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let lower = s.to_ascii_lowercase();
        match lower.as_str() {
            "arithmetic" => return Ok(MeanSpec::arithmetic()),
            "geometric" => return Ok(MeanSpec::geometric()),
            "min" => return Ok(MeanSpec::min()),
            "max" => return Ok(MeanSpec::max()),
            "qa:log" => return Ok(MeanSpec::QuasiArithmetic(Generator::Log)),
            "qa:exp" => return Ok(MeanSpec::QuasiArithmetic(Generator::Exp)),
            _ => {}
        }
        if let Some(p) = lower.strip_prefix("power:") {
            return MeanSpec::power(parse_ext_real(p)?);
        }
        if let Some(q) = lower.strip_prefix("qa:pow:") {
            let q = parse_ext_real(q)?;
            return MeanSpec::quasi_arithmetic(Generator::Power(q)).map_err(|e| Error::Parse(e.to_string()));
        }
        Err(Error::Parse(format!("unknown mean spec: {s:?}")))
    }
}

impl fmt::Display for MeanSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeanSpec::Power(p) => write!(f, "power:{}", fmt_ext_real(*p)),
            MeanSpec::QuasiArithmetic(Generator::Log) => write!(f, "qa:log"),
            MeanSpec::QuasiArithmetic(Generator::Exp) => write!(f, "qa:exp"),
            MeanSpec::QuasiArithmetic(Generator::Power(q)) => write!(f, "qa:pow:{q}"),
        }
    }
}

impl Serialize for MeanSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MeanSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
