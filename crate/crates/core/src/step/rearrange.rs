use std::cmp::Ordering;

use serde::Serialize;

use crate::axioms::CheckResult;
use crate::error::Result;
use crate::kedlaya::partial_means;
use crate::mean::MeanSpec;
use crate::numeric::Numeric;
use crate::rational::Rational;
use crate::vectors::{check_len, EntryVector, WeightVector};

use super::{nonincreasing_rearrangement, step_from_weighted, StepFunction, STEP_SLACK};

/// A nonincreasing `y` with weights `ψ` carrying the same value
/// distribution as `(x, λ)`, on a partition refining `(Λ_n)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RearrangementResult {
    pub y: EntryVector,
    pub psi: WeightVector,
    /// `Ψ_m = ψ_1 + … + ψ_m`.
    pub psi_partial: Vec<Rational>,
    /// `i_n` with `Ψ_{i_n} = Λ_n`, and `i_0 = 0`.
    pub index_map: Vec<usize>,
    pub rearranged: StepFunction,
}

/// Entries surviving the removal of zero weights.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Elimination {
    pub x: EntryVector,
    pub lambda: WeightVector,
    /// Zero-based indices of the removed entries.
    pub removed: Vec<usize>,
}

/// Drops zero-weight entries; the weighted mean of every prefix is
/// unchanged.
pub fn eliminate_zero_weights(x: &EntryVector, lambda: &WeightVector) -> Result<Elimination> {
    check_len(x.len(), lambda.len())?;
    let mut xs = Vec::new();
    let mut ws = Vec::new();
    let mut removed = Vec::new();
    for (i, (xi, wi)) in x.iter().zip(lambda.iter()).enumerate() {
        if wi.is_zero() {
            removed.push(i);
        } else {
            xs.push(xi.clone());
            ws.push(wi.clone());
        }
    }
    Ok(Elimination {
        x: EntryVector::new(xs)?,
        lambda: WeightVector::new(ws)?,
        removed,
    })
}

/// Rearranges `f = step(x, λ)` to `f*` and cuts `f*` at every `Λ_n`.
pub fn rearrange_pair(x: &EntryVector, lambda: &WeightVector) -> Result<RearrangementResult> {
    let f = step_from_weighted(x, lambda)?;
    let star = nonincreasing_rearrangement(&f);
    let mut cuts: Vec<Rational> = f.breakpoints()[1..]
        .iter()
        .chain(&star.breakpoints()[1..])
        .cloned()
        .collect();
    cuts.sort();
    cuts.dedup();

    let mut y = Vec::with_capacity(cuts.len());
    let mut psi = Vec::with_capacity(cuts.len());
    let mut prev = Rational::zero();
    for c in &cuts {
        y.push(star.value_at(&prev).expect("cut inside the domain").clone());
        psi.push(Numeric::Exact(c - &prev));
        prev = c.clone();
    }
    let mut index_map = Vec::with_capacity(x.len() + 1);
    index_map.push(0);
    for b in &f.breakpoints()[1..] {
        let m = cuts.binary_search(b).expect("every Λ_n is a cut");
        index_map.push(m + 1);
    }
    Ok(RearrangementResult {
        y: EntryVector::new(y)?,
        psi: WeightVector::new(psi)?,
        psi_partial: cuts,
        index_map,
        rearranged: star,
    })
}

fn mass_by_value(values: &[Numeric], weights: &[Numeric]) -> Vec<(Numeric, Rational)> {
    let mut pairs: Vec<(Numeric, Rational)> = values
        .iter()
        .cloned()
        .zip(weights.iter().map(Numeric::to_rational))
        .collect();
    pairs.sort_by(|a, b| a.0.cmp_exact(&b.0));
    let mut out: Vec<(Numeric, Rational)> = Vec::new();
    for (v, w) in pairs {
        match out.last_mut() {
            Some((ov, ow)) if ov.cmp_exact(&v) == Ordering::Equal => *ow = &*ow + &w,
            _ => out.push((v, w)),
        }
    }
    out
}

/// `Σ_{x_n = t} λ_n = Σ_{y_m = t} ψ_m` for every value `t`, exactly.
pub fn check_equidistribution(x: &EntryVector, lambda: &WeightVector, result: &RearrangementResult) -> CheckResult {
    let lhs = mass_by_value(x.as_slice(), lambda.as_slice());
    let rhs = mass_by_value(result.y.as_slice(), result.psi.as_slice());
    let mut worst = Rational::zero();
    let (mut i, mut j) = (0, 0);
    while i < lhs.len() || j < rhs.len() {
        let ord = match (lhs.get(i), rhs.get(j)) {
            (Some(a), Some(b)) => a.0.cmp_exact(&b.0),
            (Some(_), None) => Ordering::Less,
            _ => Ordering::Greater,
        };
        let diff = match ord {
            Ordering::Equal => {
                let d = (&lhs[i].1 - &rhs[j].1).abs();
                i += 1;
                j += 1;
                d
            }
            Ordering::Less => {
                i += 1;
                lhs[i - 1].1.clone()
            }
            Ordering::Greater => {
                j += 1;
                rhs[j - 1].1.clone()
            }
        };
        worst = worst.max(diff);
    }
    CheckResult {
        passed: worst.is_zero(),
        abs_gap: worst.to_f64(),
        rel_gap: worst.to_f64(),
        exact: true,
    }
}

/// `Σ ψ_m y_m = Σ λ_n x_n` and `Ψ_M = Λ_N`, exactly.
pub fn check_mass_balance(x: &EntryVector, lambda: &WeightVector, result: &RearrangementResult) -> CheckResult {
    let dot = |v: &EntryVector, w: &WeightVector| -> Rational {
        v.iter()
            .zip(w.iter())
            .map(|(a, b)| a.to_rational() * b.to_rational())
            .sum()
    };
    let total: Rational = lambda.iter().map(Numeric::to_rational).sum();
    let masses = CheckResult::equal(
        &Numeric::Exact(dot(x, lambda)),
        &Numeric::Exact(dot(&result.y, &result.psi)),
        0.0,
    );
    let last = result.psi_partial.last().cloned().unwrap_or_else(Rational::zero);
    masses.and(CheckResult::equal(&Numeric::Exact(total), &Numeric::Exact(last), 0.0))
}

fn weighted_prefix_sum(spec: &MeanSpec, x: &EntryVector, w: &WeightVector) -> Result<Numeric> {
    let means = partial_means(spec, x, w)?;
    Ok(means
        .iter()
        .zip(w.iter())
        .fold(Numeric::zero(), |acc, (m, wi)| acc.add(&wi.mul(m))))
}

/// `Σ λ_n M_{i≤n}(x_i, λ_i) ≤ Σ ψ_m M_{i≤m}(y_i, ψ_i)`, exact when both
/// sides are exact and within `1e-12·max(1, |RHS|)` otherwise.
pub fn check_rearrangement_inequality(
    spec: &MeanSpec,
    x: &EntryVector,
    lambda: &WeightVector,
    result: &RearrangementResult,
) -> Result<CheckResult> {
    let lhs = weighted_prefix_sum(spec, x, lambda)?;
    let rhs = weighted_prefix_sum(spec, &result.y, &result.psi)?;
    Ok(match (&lhs, &rhs) {
        (Numeric::Exact(a), Numeric::Exact(b)) => CheckResult::at_most_exact(a, b),
        _ => {
            let (a, b) = (lhs.to_f64(), rhs.to_f64());
            CheckResult::at_most(a, b, STEP_SLACK * b.abs().max(1.0))
        }
    })
}
