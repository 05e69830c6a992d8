use serde::Serialize;

use crate::error::Result;
use crate::mean::MeanSpec;
use crate::serde_ext::{ext_real, ext_real_opt};

use super::{closed_form_c, homogeneous_limit, HardyEstimate};

/// Closed-form constant next to its numerical estimate for one exponent.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HardyTableRow {
    #[serde(serialize_with = "ext_real")]
    pub p: f64,
    #[serde(serialize_with = "ext_real")]
    pub closed_form: f64,
    pub estimate: HardyEstimate,
    /// Errors of the reported value; absent when the constant is infinite.
    #[serde(serialize_with = "ext_real_opt")]
    pub abs_error: Option<f64>,
    #[serde(serialize_with = "ext_real_opt")]
    pub rel_error: Option<f64>,
    /// Relative error of the raw window infimum.
    #[serde(serialize_with = "ext_real_opt")]
    pub raw_rel_error: Option<f64>,
}

pub fn hardy_table_row(p: f64, n_max: usize) -> Result<HardyTableRow> {
    let spec = MeanSpec::power(p)?;
    let estimate = homogeneous_limit(&spec, n_max)?;
    let c = closed_form_c(p);
    let (abs_error, rel_error, raw_rel_error) = if c.is_finite() {
        let abs = (estimate.value - c).abs();
        (Some(abs), Some(abs / c), Some((estimate.window_infimum - c).abs() / c))
    } else {
        (None, None, None)
    };
    Ok(HardyTableRow {
        p,
        closed_form: c,
        estimate,
        abs_error,
        rel_error,
        raw_rel_error,
    })
}

pub fn hardy_table(ps: &[f64], n_max: usize) -> Result<Vec<HardyTableRow>> {
    ps.iter().map(|&p| hardy_table_row(p, n_max)).collect()
}
