use serde::Serialize;

use crate::mean::CompensatedSum;

use super::WeightFamily;

/// Tail increments `S(n) − S(n/2)` at or above this count as growth.
pub const GROWTH_INCREMENT: f64 = 1e-2;
/// Tail increments below this count as a stall.
pub const STALL_INCREMENT: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Divergence {
    Divergent,
    Convergent,
    UndecidedAtCap,
}

impl Divergence {
    fn from_flag(divergent: bool) -> Self {
        if divergent {
            Divergence::Divergent
        } else {
            Divergence::Convergent
        }
    }

    /// Two verdicts contradict only when one is divergent and the other
    /// convergent.
    pub fn agrees_with(self, other: Divergence) -> bool {
        !matches!(
            (self, other),
            (Divergence::Divergent, Divergence::Convergent) | (Divergence::Convergent, Divergence::Divergent)
        )
    }
}

/// Partial-sum behaviour of one positive series at the cap.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesBehavior {
    pub partial_sum: f64,
    pub half_sum: f64,
    pub tail_increment: f64,
    pub exceeds_threshold: bool,
    pub verdict: Divergence,
}

impl SeriesBehavior {
    fn new(partial_sum: f64, half_sum: f64, threshold: f64) -> Self {
        let tail_increment = partial_sum - half_sum;
        let exceeds_threshold = partial_sum > threshold;
        let verdict = if exceeds_threshold || tail_increment >= GROWTH_INCREMENT {
            Divergence::Divergent
        } else if tail_increment < STALL_INCREMENT {
            Divergence::Convergent
        } else {
            Divergence::UndecidedAtCap
        };
        SeriesBehavior {
            partial_sum,
            half_sum,
            tail_increment,
            exceeds_threshold,
            verdict,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivergenceReport {
    pub family: WeightFamily,
    pub threshold: f64,
    pub n_cap: usize,
    /// Closed-form flag for catalog families.
    pub analytic: Option<bool>,
    pub verdict: Divergence,
    /// `Σ λ_n`.
    pub weights: SeriesBehavior,
    /// `Σ λ_n / Λ_n`.
    pub ratios: SeriesBehavior,
    /// The two series behave alike.
    pub cross_check_passed: bool,
    /// Numeric verdicts do not contradict the closed-form flag.
    pub matches_analytic: bool,
}

/// Divergence of `Σ λ_n`, cross-checked against `Σ λ_n / Λ_n`.
pub fn classify_divergence(family: &WeightFamily, threshold: f64, n_cap: usize) -> DivergenceReport {
    let n_cap = n_cap.max(2);
    let half = n_cap / 2;
    let mut lam = CompensatedSum::new();
    let mut ratio = CompensatedSum::new();
    let (mut lam_half, mut ratio_half) = (0.0, 0.0);
    for n in 1..=n_cap {
        let t = family.term(n);
        lam.add(t);
        ratio.add(t / lam.value());
        if n == half {
            lam_half = lam.value();
            ratio_half = ratio.value();
        }
    }
    let weights = SeriesBehavior::new(lam.value(), lam_half, threshold);
    let ratios = SeriesBehavior::new(ratio.value(), ratio_half, threshold);
    let analytic = family.is_catalog().then(|| family.is_divergent());
    let verdict = match analytic {
        Some(flag) => Divergence::from_flag(flag),
        None => weights.verdict,
    };
    let cross_check_passed = weights.verdict.agrees_with(ratios.verdict);
    let matches_analytic = match analytic {
        Some(flag) => {
            let a = Divergence::from_flag(flag);
            weights.verdict.agrees_with(a) && ratios.verdict.agrees_with(a)
        }
        None => true,
    };
    DivergenceReport {
        family: family.clone(),
        threshold,
        n_cap,
        analytic,
        verdict,
        weights,
        ratios,
        cross_check_passed,
        matches_analytic,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_examples() {
        let r = classify_divergence(&WeightFamily::ones(), 1e3, 100_000);
        assert_eq!(r.verdict, Divergence::Divergent);
        assert_eq!(r.ratios.verdict, Divergence::Divergent);
        assert!(r.cross_check_passed && r.matches_analytic);

        let r = classify_divergence(&WeightFamily::Geometric(0.5), 1e3, 100_000);
        assert_eq!(r.verdict, Divergence::Convergent);
        assert_eq!(r.weights.verdict, Divergence::Convergent);
        assert_eq!(r.ratios.verdict, Divergence::Convergent);
        assert!(r.cross_check_passed);

        let r = classify_divergence(&WeightFamily::PowerLaw(-1.0), 1e3, 100_000);
        assert_eq!(r.verdict, Divergence::Divergent);
        assert!(r.cross_check_passed && r.matches_analytic);
    }

    #[test]
    fn explicit_uses_partial_sums() {
        let r = classify_divergence(&WeightFamily::Explicit(vec![1.0, 2.0, 0.0]), 1e3, 10_000);
        assert_eq!(r.analytic, None);
        assert_eq!(r.verdict, Divergence::Convergent);
        let r = classify_divergence(&WeightFamily::Explicit(vec![1.0, 0.5]), 1e3, 10_000);
        assert_eq!(r.verdict, Divergence::Divergent);
        assert!(r.cross_check_passed);
    }

    #[test]
    fn undecided_never_contradicts() {
        assert!(Divergence::UndecidedAtCap.agrees_with(Divergence::Divergent));
        assert!(Divergence::UndecidedAtCap.agrees_with(Divergence::Convergent));
        assert!(!Divergence::Divergent.agrees_with(Divergence::Convergent));
    }
}
