//! Weighted Hardy inequalities: finite ratios, the sharp constant of power
//! means, numerical estimates of the λ-Hardy constant and searches for
//! lower bounds.

mod divergence;
mod estimate;
mod family;
mod ratio;
mod search;
mod table;

pub use divergence::{classify_divergence, Divergence, DivergenceReport, SeriesBehavior};
pub use estimate::{
    a_sequence, est_lambda, fit_window, homogeneous_limit, EstimateOptions, Fit, FitModel, HardyEstimate, YPoint,
    FIT_RESIDUAL_GATE,
};
pub use family::WeightFamily;
pub use ratio::{hardy_partial_ratio, hardy_ratio_f64, hardy_sequence, HardyRatioTrace};
pub use search::{adversarial_lower_bound, mu1_sampling_check, AdversarialResult, Mu1Report, MU1_SLACK};
pub use table::{hardy_table, hardy_table_row, HardyTableRow};

/// Sharp Hardy constant of the power mean with exponent `p`:
/// `1` at `−∞`, `e` at `0`, `(1 − p)^(−1/p)` below `1`, and `+∞` from `1` on.
pub fn closed_form_c(p: f64) -> f64 {
    if p.is_nan() {
        f64::NAN
    } else if p == f64::NEG_INFINITY {
        1.0
    } else if p >= 1.0 {
        f64::INFINITY
    } else if p == 0.0 {
        std::f64::consts::E
    } else {
        (-(-p).ln_1p() / p).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        assert_eq!(closed_form_c(0.5), 4.0);
        assert_eq!(closed_form_c(0.0), std::f64::consts::E);
        assert_eq!(closed_form_c(f64::NEG_INFINITY), 1.0);
        assert_eq!(closed_form_c(1.0), f64::INFINITY);
        assert_eq!(closed_form_c(f64::INFINITY), f64::INFINITY);
        assert_eq!(closed_form_c(-1.0), 2.0);
        assert!((closed_form_c(0.75) - 4f64.powf(4.0 / 3.0)).abs() < 1e-12);
        assert!((closed_form_c(-1e-9) - std::f64::consts::E).abs() < 1e-8);
    }
}
