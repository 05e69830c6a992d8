use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kedlaya::partial_means;
use crate::mean::{CompensatedSum, MeanAccumulator, MeanSpec};
use crate::numeric::Numeric;
use crate::rational::Rational;
use crate::serde_ext::ext_real;
use crate::vectors::{check_len, EntryVector, WeightVector};

use super::{eliminate_zero_weights, step_from_weighted, StepFunction, STEP_SLACK};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainOptions {
    /// Grid size, at least 2.
    pub j: usize,
    /// Upper bound for the unit-weight Hardy constant of the mean.
    #[serde(serialize_with = "ext_real")]
    pub hc_bound: f64,
    /// Sub-cells per grid cell for the dense cross-check of `∫ C_j`.
    pub dense_refinement: usize,
}

impl ChainOptions {
    pub fn new(j: usize, hc_bound: f64) -> Self {
        ChainOptions {
            j,
            hc_bound,
            dense_refinement: 8,
        }
    }
}

/// One inequality `lhs ≤ rhs` of the chain.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainStep {
    pub name: &'static str,
    pub lhs: f64,
    #[serde(serialize_with = "ext_real")]
    pub rhs: f64,
    #[serde(serialize_with = "ext_real")]
    pub margin: f64,
    pub passed: bool,
}

impl ChainStep {
    fn new(name: &'static str, lhs: f64, rhs: f64) -> Self {
        let margin = rhs - lhs;
        ChainStep {
            name,
            lhs,
            rhs,
            margin,
            passed: margin >= -STEP_SLACK * rhs.abs().max(1.0) || rhs == f64::INFINITY,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainReport {
    pub spec: MeanSpec,
    pub options: ChainOptions,
    /// `Σ λ_n M_{i≤n}(x_i, λ_i)` with `Λ_N = 1`.
    pub hardy_sum: f64,
    /// `Σ λ_n x_n = ∫_0^1 f` with `Λ_N = 1`.
    pub weighted_sum: f64,
    /// `f_j(n/j) = f(n/j)`, `n = 0..j`.
    pub grid_values: Vec<f64>,
    /// `∫_0^1 C_j` with `C_j` constant on grid cells.
    pub grid_integral: f64,
    /// `∫_0^1 C_j` with `C_j` constant on sub-cells.
    pub dense_integral: f64,
    #[serde(serialize_with = "ext_real")]
    pub majorant: f64,
    /// `majorant − hardy_sum`.
    #[serde(serialize_with = "ext_real")]
    pub majorant_gap: f64,
    pub steps: Vec<ChainStep>,
    pub all_passed: bool,
}

/// Grid samples `f(n/j)` for `n = 0..j`, and whether `f ≤ f_j` on every
/// grid cell.
fn grid_samples(f: &StepFunction, j: usize) -> (Vec<Numeric>, bool) {
    let jr = Rational::from_integer(j as i64);
    let mut samples = Vec::with_capacity(j);
    for n in 0..j {
        let t = Rational::from_integer(n as i64) / &jr;
        samples.push(f.value_at(&t).expect("grid point inside [0, 1)").clone());
    }
    let bps = f.breakpoints();
    let mut dominated = true;
    let mut piece = 0;
    for (n, s) in samples.iter().enumerate() {
        let hi = Rational::from_integer(n as i64 + 1) / &jr;
        while piece < f.pieces() && bps[piece] < hi {
            if f.values()[piece].cmp_exact(s) == Ordering::Greater {
                dominated = false;
            }
            if bps[piece + 1] > hi {
                break;
            }
            piece += 1;
        }
    }
    (samples, dominated)
}

/// Evaluates each inequality of the discretization argument bounding
/// `Σ λ_n M_{i≤n}(x_i, λ_i)` by `(1 + Hc)·x_1/j + Hc·Σ λ_n x_n` for a
/// nonincreasing `x`.
pub fn mu1_discretization_chain(
    spec: &MeanSpec,
    x: &EntryVector,
    lambda: &WeightVector,
    opts: &ChainOptions,
) -> Result<ChainReport> {
    check_len(x.len(), lambda.len())?;
    if opts.j < 2 {
        return Err(Error::InvalidArgument(format!("j must be at least 2, got {}", opts.j)));
    }
    if opts.dense_refinement == 0 {
        return Err(Error::InvalidArgument("dense refinement must be positive".into()));
    }
    if !lambda.get(0).is_positive() {
        return Err(Error::FirstWeightNotPositive);
    }
    if let Some(i) = x
        .as_slice()
        .windows(2)
        .position(|w| w[1].cmp_exact(&w[0]) == Ordering::Greater)
    {
        return Err(Error::NotNonincreasing { index: i + 1 });
    }

    let kept = eliminate_zero_weights(x, lambda)?;
    let total = kept.lambda.total();
    let lam = kept.lambda.scale(&Numeric::one().div(&total))?;
    let lam = WeightVector::new(lam.iter().map(|w| Numeric::Exact(w.to_rational())).collect())?;
    let f = step_from_weighted(&kept.x, &lam)?;
    let j = opts.j;
    let jf = j as f64;
    let hc = opts.hc_bound;

    let means = partial_means(spec, &kept.x, &lam)?;
    let mut hs = CompensatedSum::new();
    let mut ws = CompensatedSum::new();
    for ((m, w), xi) in means.iter().zip(lam.iter()).zip(kept.x.iter()) {
        hs.add(w.to_f64() * m.to_f64());
        ws.add(w.to_f64() * xi.to_f64());
    }
    let (hardy_sum, weighted_sum) = (hs.value(), ws.value());

    let (samples, dominated) = grid_samples(&f, j);
    let g: Vec<f64> = samples.iter().map(Numeric::to_f64).collect();
    let x1 = kept.x.get(0).to_f64();

    // prefix[n] = M_{i<n}(g_i, 1) for n = 1..j
    let mut acc = MeanAccumulator::new(spec);
    let mut prefix = vec![x1; j];
    let mut grid_states = Vec::with_capacity(j);
    for n in 1..j {
        acc.push(g[n - 1], 1.0);
        prefix[n] = acc.value().expect("pushed a unit weight");
        grid_states.push(acc);
    }
    let prefix_sum: f64 = {
        let mut s = CompensatedSum::new();
        prefix[1..].iter().for_each(|v| s.add(*v));
        s.value()
    };
    let grid_integral = (x1 + prefix_sum) / jf;
    let fin2_rhs = (x1 + prefix_sum) / jf;

    let r = opts.dense_refinement;
    let mut dense = CompensatedSum::new();
    for k in 0..j * r {
        let (cell, part) = (k / r, k % r);
        let v = if k == 0 {
            x1
        } else if cell == 0 {
            g[0]
        } else if part == 0 {
            prefix[cell]
        } else {
            let mut a = grid_states[cell - 1];
            a.push(g[cell], part as f64 / r as f64);
            a.value().expect("positive weights pushed")
        };
        dense.add(v);
    }
    let dense_integral = dense.value() / (jf * r as f64);

    let grid_sum: f64 = {
        let mut s = CompensatedSum::new();
        g.iter().for_each(|v| s.add(*v));
        s.value()
    };
    let fin3_rhs = if hc.is_infinite() { f64::INFINITY } else { hc * grid_sum };
    let majorant = if hc.is_infinite() {
        f64::INFINITY
    } else {
        (1.0 + hc) * x1 / jf + hc * weighted_sum
    };

    let mut steps = vec![
        ChainStep {
            name: "f_le_f_j",
            lhs: 0.0,
            rhs: 0.0,
            margin: 0.0,
            passed: dominated,
        },
        ChainStep::new("fin1", hardy_sum, grid_integral),
        ChainStep::new("fin1_dense", hardy_sum, dense_integral),
        ChainStep::new("dense_le_grid", dense_integral, grid_integral),
        ChainStep::new("fin2", grid_integral, fin2_rhs),
        ChainStep::new("fin3", prefix_sum, fin3_rhs),
        ChainStep::new("fin4", grid_sum / jf, x1 / jf + weighted_sum),
        ChainStep::new("combined", hardy_sum, majorant),
    ];
    if !dominated {
        steps[0].margin = -1.0;
    }
    let all_passed = steps.iter().all(|s| s.passed);
    Ok(ChainReport {
        spec: *spec,
        options: opts.clone(),
        hardy_sum,
        weighted_sum,
        grid_values: g,
        grid_integral,
        dense_integral,
        majorant,
        majorant_gap: majorant - hardy_sum,
        steps,
        all_passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardy::closed_form_c;

    #[test]
    fn min_example() {
        let x = EntryVector::new(vec![Numeric::one(), Numeric::ratio(1, 2)]).unwrap();
        let w = WeightVector::new(vec![Numeric::ratio(1, 2), Numeric::ratio(1, 2)]).unwrap();
        let r = mu1_discretization_chain(&MeanSpec::min(), &x, &w, &ChainOptions::new(4, 1.0)).unwrap();
        assert!(r.all_passed, "{r:?}");
        assert_eq!(r.grid_values, vec![1.0, 1.0, 0.5, 0.5]);
        assert!((r.hardy_sum - 0.75).abs() < 1e-15);
        assert!((r.weighted_sum - 0.75).abs() < 1e-15);
    }

    #[test]
    fn constant_entries_are_tight() {
        let x = EntryVector::from_ints(&[3, 3, 3]).unwrap();
        let w = WeightVector::from_ints(&[1, 2, 1]).unwrap();
        let r = mu1_discretization_chain(&MeanSpec::Power(0.5), &x, &w, &ChainOptions::new(8, 4.0)).unwrap();
        assert!(r.all_passed);
        assert!((r.hardy_sum - 3.0).abs() < 1e-12);
        assert!((r.grid_integral - 3.0).abs() < 1e-12);
        assert!((r.dense_integral - 3.0).abs() < 1e-12);
    }

    #[test]
    fn geometric_sweep_shrinks_gap() {
        let x = EntryVector::new(vec![Numeric::one(), Numeric::ratio(1, 2), Numeric::ratio(1, 3)]).unwrap();
        let w = WeightVector::ones(3);
        let hc = closed_form_c(0.0);
        let gaps: Vec<f64> = [8, 64, 512]
            .iter()
            .map(|&j| {
                let r = mu1_discretization_chain(&MeanSpec::geometric(), &x, &w, &ChainOptions::new(j, hc)).unwrap();
                assert!(r.all_passed, "{r:?}");
                r.majorant_gap
            })
            .collect();
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2]);
    }

    #[test]
    fn zero_weights_are_eliminated() {
        let x = EntryVector::from_ints(&[4, 2, 1]).unwrap();
        let w = WeightVector::from_ints(&[1, 0, 3]).unwrap();
        let r = mu1_discretization_chain(&MeanSpec::Power(-1.0), &x, &w, &ChainOptions::new(16, 2.0)).unwrap();
        assert!(r.all_passed);
    }

    #[test]
    fn guards() {
        let x = EntryVector::from_ints(&[1, 2]).unwrap();
        let w = WeightVector::ones(2);
        assert_eq!(
            mu1_discretization_chain(&MeanSpec::min(), &x, &w, &ChainOptions::new(4, 1.0)),
            Err(Error::NotNonincreasing { index: 1 })
        );
        let x = EntryVector::from_ints(&[2, 1]).unwrap();
        assert!(mu1_discretization_chain(&MeanSpec::min(), &x, &w, &ChainOptions::new(1, 1.0)).is_err());
    }
}
