//! Incremental evaluation of weighted means over growing prefixes.

use super::spec::{Generator, MeanSpec};

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    fn scale(&mut self, c: f64) {
        self.sum *= c;
        self.comp *= c;
    }
}

/// Running `ln Σ e^{t_i}`, shifted by the running maximum so no term
/// overflows.
#[derive(Clone, Copy, Debug)]
struct LogSumExp {
    max: f64,
    scaled: CompensatedSum,
}

impl LogSumExp {
    fn new() -> Self {
        LogSumExp {
            max: f64::NEG_INFINITY,
            scaled: CompensatedSum::new(),
        }
    }

    fn push(&mut self, t: f64) {
        if t <= self.max {
            self.scaled.add((t - self.max).exp());
        } else {
            if self.max > f64::NEG_INFINITY {
                self.scaled.scale((self.max - t).exp());
            }
            self.scaled.add(1.0);
            self.max = t;
        }
    }

    fn value(&self) -> f64 {
        self.max + self.scaled.value().ln()
    }
}

/// Below this |p| the power mean is evaluated through `expm1`/`log1p`,
/// which avoids the cancellation in `(ln Σ λ x^p − ln Σ λ) / p`.
const SMALL_EXPONENT: f64 = 1e-2;
/// Exponents closer to zero than this use the geometric branch.
pub const GEOMETRIC_CUTOFF: f64 = 1e-12;

#[derive(Clone, Copy, Debug)]
enum State {
    Arithmetic(CompensatedSum),
    Geometric(CompensatedSum),
    SmallPower { p: f64, sum: CompensatedSum },
    Power { p: f64, lse: LogSumExp },
    Exp(LogSumExp),
    Min(f64),
    Max(f64),
}

/// Weighted mean of a growing list of `(entry, weight)` pairs in binary64.
///
/// Zero-weight pairs are skipped (elimination principle). The value is
/// clamped to the range of the entries pushed so far with positive weight.
#[derive(Clone, Copy, Debug)]
pub struct MeanAccumulator {
    state: State,
    total_weight: CompensatedSum,
    lo: f64,
    hi: f64,
    count: usize,
}

impl MeanAccumulator {
    pub fn new(spec: &MeanSpec) -> Self {
        let state = match *spec {
            MeanSpec::Power(p) => Self::power_state(p),
            MeanSpec::QuasiArithmetic(Generator::Power(q)) => Self::power_state(q),
            MeanSpec::QuasiArithmetic(Generator::Log) => State::Geometric(CompensatedSum::new()),
            MeanSpec::QuasiArithmetic(Generator::Exp) => State::Exp(LogSumExp::new()),
        };
        MeanAccumulator {
            state,
            total_weight: CompensatedSum::new(),
            lo: f64::INFINITY,
            hi: f64::NEG_INFINITY,
            count: 0,
        }
    }

    fn power_state(p: f64) -> State {
        if p == f64::NEG_INFINITY {
            State::Min(f64::INFINITY)
        } else if p == f64::INFINITY {
            State::Max(f64::NEG_INFINITY)
        } else if p == 1.0 {
            State::Arithmetic(CompensatedSum::new())
        } else if p.abs() < GEOMETRIC_CUTOFF {
            State::Geometric(CompensatedSum::new())
        } else if p.abs() < SMALL_EXPONENT {
            State::SmallPower {
                p,
                sum: CompensatedSum::new(),
            }
        } else {
            State::Power {
                p,
                lse: LogSumExp::new(),
            }
        }
    }

    /// Add an entry `x > 0` with weight `w ≥ 0`.
    pub fn push(&mut self, x: f64, w: f64) {
        debug_assert!(x > 0.0 && w >= 0.0);
        if w == 0.0 {
            return;
        }
        self.count += 1;
        self.total_weight.add(w);
        self.lo = self.lo.min(x);
        self.hi = self.hi.max(x);
        match &mut self.state {
            State::Arithmetic(s) => s.add(w * x),
            State::Geometric(s) => s.add(w * x.ln()),
            State::SmallPower { p, sum } => sum.add(w * (*p * x.ln()).exp_m1()),
            State::Power { p, lse } => lse.push(w.ln() + *p * x.ln()),
            State::Exp(lse) => lse.push(w.ln() + x),
            State::Min(m) => *m = m.min(x),
            State::Max(m) => *m = m.max(x),
        }
    }

    /// Number of positive-weight entries pushed.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn total_weight(&self) -> f64 {
        self.total_weight.value()
    }

    /// Current mean, or `None` before any positive-weight entry.
    pub fn value(&self) -> Option<f64> {
        if self.count == 0 {
            return None;
        }
        let w = self.total_weight.value();
        let raw = match &self.state {
            State::Arithmetic(s) => s.value() / w,
            State::Geometric(s) => (s.value() / w).exp(),
            State::SmallPower { p, sum } => ((sum.value() / w).ln_1p() / *p).exp(),
            State::Power { p, lse } => ((lse.value() - w.ln()) / *p).exp(),
            State::Exp(lse) => lse.value() - w.ln(),
            State::Min(m) | State::Max(m) => *m,
        };
        if raw.is_nan() {
            return Some(f64::NAN);
        }
        Some(raw.clamp(self.lo, self.hi))
    }
}
