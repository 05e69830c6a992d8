//! Step functions on `[0, a)` with exact rational breakpoints, their
//! integral means and nonincreasing rearrangements.

mod chain;
mod rearrange;

pub use chain::{mu1_discretization_chain, ChainOptions, ChainReport, ChainStep};
pub use rearrange::{
    check_equidistribution, check_mass_balance, check_rearrangement_inequality, eliminate_zero_weights, rearrange_pair,
    Elimination, RearrangementResult,
};

use std::cmp::Ordering;

use serde::Serialize;

use crate::axioms::CheckResult;
use crate::error::{Error, Result};
use crate::mean::{eval_mean, MeanSpec};
use crate::numeric::Numeric;
use crate::rational::Rational;
use crate::vectors::{check_len, EntryVector, WeightVector};

/// Relative slack for float comparisons in the step-function checks.
pub const STEP_SLACK: f64 = 1e-12;

/// `f = values[i]` on `[breakpoints[i], breakpoints[i+1])`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepFunction {
    breakpoints: Vec<Rational>,
    values: Vec<Numeric>,
}

impl StepFunction {
    /// Breakpoints start at `0` and increase strictly; one positive value
    /// per interval.
    pub fn new(breakpoints: Vec<Rational>, values: Vec<Numeric>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty);
        }
        check_len(breakpoints.len(), values.len() + 1)?;
        if !breakpoints[0].is_zero() {
            return Err(Error::InvalidArgument("first breakpoint must be 0".into()));
        }
        for w in breakpoints.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidInterval {
                    lo: w[0].to_string(),
                    hi: w[1].to_string(),
                });
            }
        }
        if let Some(index) = values.iter().position(|v| !v.is_positive()) {
            return Err(Error::NonPositiveEntry { index });
        }
        Ok(StepFunction { breakpoints, values })
    }

    /// Consecutive intervals of the given positive lengths.
    pub fn from_lengths(values: Vec<Numeric>, lengths: &[Rational]) -> Result<Self> {
        check_len(values.len(), lengths.len())?;
        let mut breakpoints = Vec::with_capacity(lengths.len() + 1);
        let mut acc = Rational::zero();
        breakpoints.push(acc.clone());
        for (index, l) in lengths.iter().enumerate() {
            if !l.is_positive() {
                return Err(Error::ZeroWeight { index });
            }
            acc = acc + l;
            breakpoints.push(acc.clone());
        }
        StepFunction::new(breakpoints, values)
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Numeric] {
        &self.values
    }

    pub fn pieces(&self) -> usize {
        self.values.len()
    }

    /// Right end `a` of the domain.
    pub fn length(&self) -> &Rational {
        self.breakpoints.last().expect("nonempty")
    }

    pub fn lengths(&self) -> Vec<Rational> {
        self.breakpoints.windows(2).map(|w| &w[1] - &w[0]).collect()
    }

    /// Index of the interval containing `t ∈ [0, a)`.
    fn piece_at(&self, t: &Rational) -> Option<usize> {
        if t.is_negative() || t >= self.length() {
            return None;
        }
        Some(self.breakpoints.partition_point(|b| b <= t) - 1)
    }

    /// `f(t)` for `t ∈ [0, a)`.
    pub fn value_at(&self, t: &Rational) -> Option<&Numeric> {
        self.piece_at(t).map(|i| &self.values[i])
    }

    /// Position of the first increase, if any.
    pub fn first_increase(&self) -> Option<usize> {
        self.values
            .windows(2)
            .position(|w| w[1].cmp_exact(&w[0]) == Ordering::Greater)
            .map(|i| i + 1)
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.first_increase().is_none()
    }

    /// Values and lengths of `f` restricted to `[p, q)`.
    pub fn restrict(&self, p: &Rational, q: &Rational) -> Result<(Vec<Numeric>, Vec<Rational>)> {
        if q <= p || p.is_negative() || q > self.length() {
            return Err(Error::InvalidInterval {
                lo: p.to_string(),
                hi: q.to_string(),
            });
        }
        let mut values = Vec::new();
        let mut lengths = Vec::new();
        let first = self.piece_at(p).expect("p inside the domain");
        for i in first..self.pieces() {
            let lo = (&self.breakpoints[i]).max(p);
            let hi = (&self.breakpoints[i + 1]).min(q);
            if hi <= lo {
                break;
            }
            values.push(self.values[i].clone());
            lengths.push(hi - lo);
        }
        Ok((values, lengths))
    }
}

/// `f = x_n` on `[Λ_{n−1}, Λ_n)`.
pub fn step_from_weighted(x: &EntryVector, lambda: &WeightVector) -> Result<StepFunction> {
    check_len(x.len(), lambda.len())?;
    let lengths: Vec<Rational> = lambda.iter().map(Numeric::to_rational).collect();
    if let Some(index) = lengths.iter().position(|l| l.is_zero()) {
        return Err(Error::ZeroWeight { index });
    }
    StepFunction::from_lengths(x.as_slice().to_vec(), &lengths)
}

/// `M` of `f` over `[p, q)`: the mean of the values weighted by the lengths
/// they occupy.
pub fn integral_mean(spec: &MeanSpec, f: &StepFunction, p: &Rational, q: &Rational) -> Result<Numeric> {
    let (values, lengths) = f.restrict(p, q)?;
    let x = EntryVector::new(values)?;
    let w = WeightVector::new(lengths.into_iter().map(Numeric::Exact).collect())?;
    eval_mean(spec, &x, &w)
}

/// Right-continuous nonincreasing rearrangement; equal values are merged
/// into one interval.
pub fn nonincreasing_rearrangement(f: &StepFunction) -> StepFunction {
    let mut pieces: Vec<(Numeric, Rational)> = f.values.iter().cloned().zip(f.lengths()).collect();
    pieces.sort_by(|a, b| b.0.cmp_exact(&a.0));
    let mut merged: Vec<(Numeric, Rational)> = Vec::with_capacity(pieces.len());
    for (v, l) in pieces {
        match merged.last_mut() {
            Some((mv, ml)) if mv.cmp_exact(&v) == Ordering::Equal => *ml = &*ml + &l,
            _ => merged.push((v, l)),
        }
    }
    let (values, lengths): (Vec<Numeric>, Vec<Rational>) = merged.into_iter().unzip();
    StepFunction::from_lengths(values, &lengths).expect("rearrangement of a valid step function")
}

/// `F(u) = M∫_0^u f` is nonincreasing along `grid ⊂ (0, a]`.
pub fn prefix_mean_monotone(spec: &MeanSpec, f: &StepFunction, grid: &[Rational]) -> Result<CheckResult> {
    if let Some(index) = f.first_increase() {
        return Err(Error::NotNonincreasing { index });
    }
    let zero = Rational::zero();
    let mut result = CheckResult::pass();
    let mut prev: Option<Numeric> = None;
    for (i, u) in grid.iter().enumerate() {
        if i > 0 && u <= &grid[i - 1] {
            return Err(Error::InvalidArgument("grid must be strictly increasing".into()));
        }
        let cur = integral_mean(spec, f, &zero, u)?;
        if let Some(p) = prev {
            let step = match (&cur, &p) {
                (Numeric::Exact(c), Numeric::Exact(p)) => CheckResult::at_most_exact(c, p),
                _ => {
                    let (c, p) = (cur.to_f64(), p.to_f64());
                    CheckResult::at_most(c, p, STEP_SLACK * p.abs().max(1.0))
                }
            };
            result = result.and(step);
        }
        prev = Some(cur);
    }
    Ok(result)
}
