use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mean::{MeanAccumulator, MeanSpec};
use crate::serde_ext::ext_real;

use super::WeightFamily;

/// Extrapolation is used only when the best convergent fit has a relative
/// RMS residual below this.
pub const FIT_RESIDUAL_GATE: f64 = 1e-4;

/// Upper bound on the number of window points passed to the fits.
const FIT_POINTS: usize = 4096;

const Y_GRID: usize = 25;
const Y_LO: f64 = 1e-3;
const Y_HI: f64 = 1e3;
const Y_RTOL: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateOptions {
    pub n_max: usize,
    pub window_fraction: f64,
    pub y_search: bool,
    pub extrapolate: bool,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions {
            n_max: 200_000,
            window_fraction: 0.5,
            y_search: false,
            extrapolate: true,
        }
    }
}

impl EstimateOptions {
    pub fn with_n_max(n_max: usize) -> Self {
        EstimateOptions {
            n_max,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_max < 100 {
            return Err(Error::InvalidArgument(format!(
                "n_max must be at least 100, got {}",
                self.n_max
            )));
        }
        if !(self.window_fraction > 0.0 && self.window_fraction < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "window_fraction must lie in (0, 1), got {}",
                self.window_fraction
            )));
        }
        Ok(())
    }
}

/// Two-parameter models fitted to the window terms `a_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    /// `c + a·ln(n)/n`.
    LogOverN,
    /// `c + a·n^(−β)`, `β` fitted.
    PowerDecay,
    /// `c + a·ln(n)`.
    LogGrowth,
    /// `a·n^γ`.
    PowerGrowth,
}

impl FitModel {
    pub fn is_convergent(self) -> bool {
        matches!(self, FitModel::LogOverN | FitModel::PowerDecay)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fit {
    pub model: FitModel,
    /// Limit for convergent models, intercept for `LogGrowth`, `ln a` for
    /// `PowerGrowth`.
    pub c: f64,
    /// Coefficient of the `n`-dependent term; for `PowerGrowth`, `γ`.
    pub slope: f64,
    /// Fitted decay exponent of `PowerDecay`.
    pub beta: Option<f64>,
    /// RMS residual over the mean of `|a_n|`.
    pub rel_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct YPoint {
    #[serde(serialize_with = "ext_real")]
    pub y: f64,
    #[serde(serialize_with = "ext_real")]
    pub estimate: f64,
}

/// Numerical value of `sup_y liminf_n a_n(y)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HardyEstimate {
    pub spec: MeanSpec,
    pub weights: WeightFamily,
    #[serde(serialize_with = "ext_real")]
    pub value: f64,
    pub n_used: usize,
    pub window_start: usize,
    #[serde(serialize_with = "ext_real")]
    pub window_infimum: f64,
    #[serde(serialize_with = "ext_real")]
    pub last_term: f64,
    pub extrapolated: Option<f64>,
    pub extrapolation_model: Option<FitModel>,
    pub divergent: bool,
    pub overflow: bool,
    pub y: f64,
    pub y_grid: Vec<YPoint>,
    pub fits: Vec<Fit>,
    pub diagnostics: String,
}

/// `a_n(y) = M((x_1..x_n), (λ_1..λ_n)) / x_n` with `x_k = y / Λ_k`, for
/// `n = 1..len`.
pub fn a_sequence(spec: &MeanSpec, terms: &[f64], partial_sums: &[f64], y: f64) -> Vec<f64> {
    let mut acc = MeanAccumulator::new(spec);
    terms
        .iter()
        .zip(partial_sums)
        .map(|(&w, &s)| {
            let x = y / s;
            acc.push(x, w);
            acc.value().expect("first weight positive") / x
        })
        .collect()
}

/// Least squares `a ≈ c + s·g`; returns `(c, s, rms residual)`.
fn linear_fit(g: &[f64], a: &[f64]) -> (f64, f64, f64) {
    let n = g.len() as f64;
    let gm = g.iter().sum::<f64>() / n;
    let am = a.iter().sum::<f64>() / n;
    let (mut sgg, mut sga) = (0.0, 0.0);
    for (gi, ai) in g.iter().zip(a) {
        sgg += (gi - gm) * (gi - gm);
        sga += (gi - gm) * (ai - am);
    }
    let s = if sgg > 0.0 { sga / sgg } else { 0.0 };
    let c = am - s * gm;
    let rss: f64 = g.iter().zip(a).map(|(gi, ai)| (c + s * gi - ai).powi(2)).sum();
    (c, s, (rss / n).sqrt())
}

fn power_decay_residual(n: &[f64], a: &[f64], beta: f64) -> (f64, f64, f64) {
    let g: Vec<f64> = n.iter().map(|v| v.powf(-beta)).collect();
    linear_fit(&g, a)
}

fn fit_power_decay(n: &[f64], a: &[f64], scale: f64) -> Fit {
    const STEPS: usize = 200;
    let (lo, hi) = (0.02f64.ln(), 3.0f64.ln());
    let betas: Vec<f64> = (0..STEPS)
        .map(|i| (lo + (hi - lo) * i as f64 / (STEPS - 1) as f64).exp())
        .collect();
    let (best, _) = betas
        .iter()
        .enumerate()
        .map(|(i, &b)| (i, power_decay_residual(n, a, b).2))
        .fold((0, f64::INFINITY), |acc, (i, r)| if r < acc.1 { (i, r) } else { acc });
    let mut l = betas[best.saturating_sub(1)].ln();
    let mut h = betas[(best + 1).min(STEPS - 1)].ln();
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let f = |lb: f64| power_decay_residual(n, a, lb.exp()).2;
    let mut m1 = h - inv_phi * (h - l);
    let mut m2 = l + inv_phi * (h - l);
    let (mut f1, mut f2) = (f(m1), f(m2));
    for _ in 0..40 {
        if f1 <= f2 {
            h = m2;
            m2 = m1;
            f2 = f1;
            m1 = h - inv_phi * (h - l);
            f1 = f(m1);
        } else {
            l = m1;
            m1 = m2;
            f1 = f2;
            m2 = l + inv_phi * (h - l);
            f2 = f(m2);
        }
    }
    let mut beta = ((l + h) / 2.0).exp();
    let mut fit = power_decay_residual(n, a, beta);
    let grid_fit = power_decay_residual(n, a, betas[best]);
    if grid_fit.2 < fit.2 {
        beta = betas[best];
        fit = grid_fit;
    }
    Fit {
        model: FitModel::PowerDecay,
        c: fit.0,
        slope: fit.1,
        beta: Some(beta),
        rel_residual: fit.2 / scale,
    }
}

/// Fits all four models to `(n, a_n)`.
pub fn fit_window(n: &[f64], a: &[f64]) -> Vec<Fit> {
    let scale = a.iter().map(|v| v.abs()).sum::<f64>() / a.len() as f64;
    let mut fits = Vec::with_capacity(4);

    let g: Vec<f64> = n.iter().map(|v| v.ln() / v).collect();
    let (c, s, r) = linear_fit(&g, a);
    fits.push(Fit {
        model: FitModel::LogOverN,
        c,
        slope: s,
        beta: None,
        rel_residual: r / scale,
    });

    fits.push(fit_power_decay(n, a, scale));

    let ln_n: Vec<f64> = n.iter().map(|v| v.ln()).collect();
    let (c, s, r) = linear_fit(&ln_n, a);
    fits.push(Fit {
        model: FitModel::LogGrowth,
        c,
        slope: s,
        beta: None,
        rel_residual: r / scale,
    });

    let ln_a: Vec<f64> = a.iter().map(|v| v.ln()).collect();
    let (c, gamma, _) = linear_fit(&ln_n, &ln_a);
    let rss: f64 = ln_n
        .iter()
        .zip(a)
        .map(|(l, ai)| ((c + gamma * l).exp() - ai).powi(2))
        .sum();
    fits.push(Fit {
        model: FitModel::PowerGrowth,
        c,
        slope: gamma,
        beta: None,
        rel_residual: (rss / a.len() as f64).sqrt() / scale,
    });
    fits
}

fn best_of(fits: &[Fit], convergent: bool) -> Option<&Fit> {
    fits.iter()
        .filter(|f| f.model.is_convergent() == convergent && f.rel_residual.is_finite())
        .min_by(|a, b| a.rel_residual.total_cmp(&b.rel_residual))
}

/// Window analysis of one `a_n` sequence.
struct WindowSummary {
    value: f64,
    window_start: usize,
    window_infimum: f64,
    last_term: f64,
    extrapolated: Option<f64>,
    model: Option<FitModel>,
    divergent: bool,
    overflow: bool,
    fits: Vec<Fit>,
}

fn summarize(a: &[f64], window_fraction: f64, extrapolate: bool) -> WindowSummary {
    let n_max = a.len();
    let start = ((window_fraction * n_max as f64).ceil() as usize).clamp(1, n_max);
    let window = &a[start - 1..];
    let overflow = a.iter().any(|v| !v.is_finite());
    let window_infimum = window.iter().copied().fold(f64::INFINITY, f64::min);
    let window_sup = window.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let last_term = a[n_max - 1];
    let mut summary = WindowSummary {
        value: window_infimum,
        window_start: start,
        window_infimum,
        last_term,
        extrapolated: None,
        model: None,
        divergent: false,
        overflow,
        fits: Vec::new(),
    };
    if overflow {
        summary.value = f64::INFINITY;
        return summary;
    }
    if window_sup - window_infimum <= 4.0 * f64::EPSILON * window_infimum.abs() {
        return summary;
    }

    let len = window.len();
    let stride = len.div_ceil(FIT_POINTS).max(1);
    let mut idx: Vec<usize> = (0..len).step_by(stride).collect();
    if *idx.last().expect("nonempty window") != len - 1 {
        idx.push(len - 1);
    }
    let ns: Vec<f64> = idx.iter().map(|&i| (start + i) as f64).collect();
    let vs: Vec<f64> = idx.iter().map(|&i| window[i]).collect();
    let fits = fit_window(&ns, &vs);

    let conv = best_of(&fits, true).cloned();
    let grow = best_of(&fits, false).cloned();
    if let (Some(c), Some(g)) = (&conv, &grow) {
        if g.rel_residual < c.rel_residual && g.slope > 0.0 {
            summary.divergent = true;
            summary.value = f64::INFINITY;
        }
    }
    if !summary.divergent && extrapolate {
        if let Some(c) = conv {
            if c.rel_residual < FIT_RESIDUAL_GATE && c.c.is_finite() && c.c > 0.0 {
                summary.extrapolated = Some(c.c);
                summary.model = Some(c.model);
                summary.value = c.c;
            }
        }
    }
    summary.fits = fits;
    summary
}

fn diagnostics(s: &WindowSummary, n_max: usize, y_note: &str) -> String {
    let mut parts = vec![format!(
        "liminf approximated by the infimum of a_n over n in [{}, {}]",
        s.window_start, n_max
    )];
    if s.overflow {
        parts.push("non-finite term encountered; value set to +inf".into());
    } else if s.divergent {
        parts.push(
            "growth model fits the window better than every convergent model; flagged divergent, value set to +inf"
                .into(),
        );
    } else if let (Some(m), Some(c)) = (s.model, s.extrapolated) {
        parts.push(format!("heuristic extrapolation with model {m:?} gives {c}"));
    } else if s.fits.is_empty() {
        parts.push("window is constant; no extrapolation needed".into());
    } else {
        parts.push(format!(
            "no convergent fit below relative residual {FIT_RESIDUAL_GATE}; raw window infimum reported"
        ));
    }
    if !y_note.is_empty() {
        parts.push(y_note.to_string());
    }
    parts.join("; ")
}

fn estimate_at(spec: &MeanSpec, terms: &[f64], sums: &[f64], y: f64, opts: &EstimateOptions) -> WindowSummary {
    summarize(
        &a_sequence(spec, terms, sums, y),
        opts.window_fraction,
        opts.extrapolate,
    )
}

/// Largest estimate over the log-spaced grid, refined by golden-section
/// search on `ln y` around the best grid point.
fn search_y(spec: &MeanSpec, terms: &[f64], sums: &[f64], opts: &EstimateOptions) -> (f64, WindowSummary, Vec<YPoint>) {
    let (lo, hi) = (Y_LO.ln(), Y_HI.ln());
    let ys: Vec<f64> = (0..Y_GRID)
        .map(|i| (lo + (hi - lo) * i as f64 / (Y_GRID - 1) as f64).exp())
        .collect();
    let values: Vec<f64> = ys
        .par_iter()
        .map(|&y| estimate_at(spec, terms, sums, y, opts).value)
        .collect();
    let mut grid: Vec<YPoint> = ys
        .iter()
        .zip(&values)
        .map(|(&y, &estimate)| YPoint { y, estimate })
        .collect();
    let best = values
        .iter()
        .enumerate()
        .fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
        )
        .0;
    if values[best].is_infinite() {
        let y = ys[best];
        return (y, estimate_at(spec, terms, sums, y, opts), grid);
    }

    let f = |ly: f64| estimate_at(spec, terms, sums, ly.exp(), opts).value;
    let mut l = ys[best.saturating_sub(1)].ln();
    let mut h = ys[(best + 1).min(Y_GRID - 1)].ln();
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut m1 = h - inv_phi * (h - l);
    let mut m2 = l + inv_phi * (h - l);
    let (mut f1, mut f2) = (f(m1), f(m2));
    while h - l > Y_RTOL {
        if f1 >= f2 {
            h = m2;
            m2 = m1;
            f2 = f1;
            m1 = h - inv_phi * (h - l);
            f1 = f(m1);
        } else {
            l = m1;
            m1 = m2;
            f1 = f2;
            m2 = l + inv_phi * (h - l);
            f2 = f(m2);
        }
    }
    let refined = ((l + h) / 2.0).exp();
    let summary = estimate_at(spec, terms, sums, refined, opts);
    if summary.value >= values[best] {
        grid.push(YPoint {
            y: refined,
            estimate: summary.value,
        });
        (refined, summary, grid)
    } else {
        let y = ys[best];
        (y, estimate_at(spec, terms, sums, y, opts), grid)
    }
}

/// Numerical `Est_λ(M)`.
pub fn est_lambda(spec: &MeanSpec, lambda: &WeightFamily, opts: &EstimateOptions) -> Result<HardyEstimate> {
    opts.validate()?;
    let terms = lambda.terms(opts.n_max);
    let sums = lambda.partial_sums(opts.n_max);

    let (y, summary, y_grid, note) = if opts.y_search && !spec.is_homogeneous() {
        let (y, s, grid) = search_y(spec, &terms, &sums, opts);
        (
            y,
            s,
            grid,
            format!(
                "sup over y searched on {Y_GRID} log-spaced points in [{Y_LO}, {Y_HI}] with golden-section refinement"
            ),
        )
    } else if opts.y_search {
        let s = estimate_at(spec, &terms, &sums, 1.0, opts);
        (
            1.0,
            s,
            Vec::new(),
            "homogeneous mean: a_n is independent of y, search skipped".to_string(),
        )
    } else {
        let s = estimate_at(spec, &terms, &sums, 1.0, opts);
        (1.0, s, Vec::new(), String::new())
    };

    Ok(HardyEstimate {
        spec: *spec,
        weights: lambda.clone(),
        value: summary.value,
        n_used: opts.n_max,
        window_start: summary.window_start,
        window_infimum: summary.window_infimum,
        last_term: summary.last_term,
        extrapolated: summary.extrapolated,
        extrapolation_model: summary.model,
        divergent: summary.divergent,
        overflow: summary.overflow,
        y,
        y_grid,
        diagnostics: diagnostics(&summary, opts.n_max, &note),
        fits: summary.fits,
    })
}

/// `lim n·M(1, 1/2, …, 1/n)` with unit weights; the same computation as
/// [`est_lambda`] with `λ = 𝟙` and `y = 1`.
pub fn homogeneous_limit(spec: &MeanSpec, n_max: usize) -> Result<HardyEstimate> {
    if !spec.is_homogeneous() {
        return Err(Error::NotHomogeneous(spec.to_string()));
    }
    est_lambda(spec, &WeightFamily::ones(), &EstimateOptions::with_n_max(n_max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardy::closed_form_c;

    #[test]
    fn min_is_exactly_one() {
        for n in [100, 101, 1000] {
            let e = homogeneous_limit(&MeanSpec::min(), n).unwrap();
            assert_eq!(e.value, 1.0);
            assert_eq!(e.window_infimum, 1.0);
            assert!(e.extrapolated.is_none());
        }
        for fam in [
            WeightFamily::Harmonic,
            WeightFamily::PowerLaw(0.5),
            WeightFamily::Constant(3.0),
        ] {
            let e = est_lambda(&MeanSpec::min(), &fam, &EstimateOptions::with_n_max(1000)).unwrap();
            assert_eq!(e.value, 1.0);
        }
    }

    #[test]
    fn geometric_mean_tends_to_e() {
        let e = homogeneous_limit(&MeanSpec::geometric(), 100_000).unwrap();
        assert!((e.value - std::f64::consts::E).abs() < 1e-3, "{e:?}");
        assert!(e.window_infimum < std::f64::consts::E);
        assert!(!e.divergent);
    }

    #[test]
    fn geometric_terms_match_factorial_root() {
        let a = a_sequence(
            &MeanSpec::geometric(),
            &[1.0; 50],
            &(1..=50).map(f64::from).collect::<Vec<_>>(),
            1.0,
        );
        let mut ln_fact = 0.0;
        for (k, ak) in a.iter().enumerate() {
            let n = (k + 1) as f64;
            ln_fact += n.ln();
            let want = n / (ln_fact / n).exp();
            assert!((ak - want).abs() < 1e-12 * want);
        }
    }

    #[test]
    fn arithmetic_mean_diverges() {
        let e = homogeneous_limit(&MeanSpec::arithmetic(), 100_000).unwrap();
        assert!(e.divergent);
        assert_eq!(e.value, f64::INFINITY);
        assert!(e.last_term > 10.0);
    }

    #[test]
    fn square_root_mean() {
        let e = est_lambda(
            &MeanSpec::Power(0.5),
            &WeightFamily::ones(),
            &EstimateOptions::default(),
        )
        .unwrap();
        assert!((e.value - 4.0).abs() < 0.02 * 4.0, "{e:?}");
        assert!(e.window_infimum <= e.last_term);
    }

    #[test]
    fn homogeneous_limit_is_est_lambda() {
        let spec = MeanSpec::Power(-1.0);
        let a = homogeneous_limit(&spec, 5000).unwrap();
        let b = est_lambda(&spec, &WeightFamily::ones(), &EstimateOptions::with_n_max(5000)).unwrap();
        assert_eq!(a, b);
        assert!((a.value - closed_form_c(-1.0)).abs() < 1e-3);
    }

    #[test]
    fn homogeneous_specs_ignore_y() {
        let terms = vec![1.0; 2000];
        let sums: Vec<f64> = (1..=2000).map(f64::from).collect();
        for spec in [MeanSpec::Power(-2.0), MeanSpec::geometric(), MeanSpec::Power(0.75)] {
            let base = a_sequence(&spec, &terms, &sums, 1.0);
            for y in [0.1, 10.0] {
                let other = a_sequence(&spec, &terms, &sums, y);
                for (u, v) in base.iter().zip(&other) {
                    assert!((u - v).abs() <= 1e-9 * u.abs());
                }
            }
        }
    }

    #[test]
    fn log_generator_matches_geometric() {
        let opts = EstimateOptions {
            n_max: 20_000,
            y_search: true,
            ..Default::default()
        };
        let qa = est_lambda(&"qa:log".parse().unwrap(), &WeightFamily::ones(), &opts).unwrap();
        let g = est_lambda(&MeanSpec::geometric(), &WeightFamily::ones(), &opts).unwrap();
        assert!((qa.value - g.value).abs() < 1e-9);
        assert!(qa.y_grid.is_empty());
    }

    #[test]
    fn exp_generator_searches_y() {
        let opts = EstimateOptions {
            n_max: 500,
            y_search: true,
            ..Default::default()
        };
        let e = est_lambda(&"qa:exp".parse().unwrap(), &WeightFamily::ones(), &opts).unwrap();
        assert!(e.y_grid.len() >= Y_GRID);
        let grid_max = e.y_grid.iter().map(|p| p.estimate).fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(e.value, grid_max);
    }

    #[test]
    fn rejects_short_runs() {
        assert!(est_lambda(
            &MeanSpec::min(),
            &WeightFamily::ones(),
            &EstimateOptions::with_n_max(99)
        )
        .is_err());
        assert!(homogeneous_limit(&"qa:exp".parse().unwrap(), 1000).is_err());
    }

    #[test]
    fn linear_fit_recovers_line() {
        let g = [1.0, 2.0, 3.0, 4.0];
        let a = [3.0, 5.0, 7.0, 9.0];
        let (c, s, r) = linear_fit(&g, &a);
        assert!((c - 1.0).abs() < 1e-12 && (s - 2.0).abs() < 1e-12 && r < 1e-12);
    }
}
