//! `hardy-means`: evaluate weighted means, search for Kedlaya violations,
//! estimate Hardy constants and run the rearrangement procedure.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hardy_means_core::axioms::{fuzz_axioms, CheckResult, SampleMode};
use hardy_means_core::hardy::{est_lambda, hardy_table, EstimateOptions, HardyTableRow, WeightFamily};
use hardy_means_core::kedlaya::{fuzz_kedlaya, WeightMode};
use hardy_means_core::numeric::format_f64 as f;
use hardy_means_core::step::{
    check_equidistribution, check_mass_balance, check_rearrangement_inequality, eliminate_zero_weights, rearrange_pair,
    Elimination, RearrangementResult,
};
use hardy_means_core::{eval_mean, EntryVector, Error, MeanSpec, Numeric, WeightVector};

const EXIT_ASSERTION: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_DOMAIN: u8 = 3;

const DEFAULT_TABLE_PS: &str = "-2,-1,-1/2,0,1/2,3/4,1";

#[derive(Parser, Debug)]
#[command(name = "hardy-means", version, about = "Weighted means and Hardy-type inequalities")]
struct Cli {
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write the report to a file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Worker threads for parallel searches (0 = all cores).
    #[arg(long, global = true, env = "HARDY_MEANS_JOBS")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Plain,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum KedlayaMode {
    V,
    W0,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum FuzzMode {
    Exact,
    Float,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a weighted mean.
    Eval {
        spec: String,
        /// Comma-separated positive entries.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Comma-separated nonnegative weights (default: all ones).
        #[arg(long, allow_hyphen_values = true)]
        w: Option<String>,
    },
    /// Search random instances for violations of the weighted Kedlaya inequality.
    Kedlaya {
        spec: String,
        #[arg(long, value_enum, default_value = "w0")]
        mode: KedlayaMode,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Succeed only if a violation is found.
        #[arg(long)]
        expect_violation: bool,
    },
    /// Estimate the weighted Hardy constant of a mean.
    HardyEstimate {
        spec: String,
        /// Weight family: const:<c>, harmonic, powerlaw:<a>, geom:<r> or explicit:<list>.
        #[arg(long, default_value = "const:1")]
        weights: String,
        #[arg(long = "n", alias = "n-max", default_value_t = 200_000)]
        n: usize,
        /// Search the starting value y of the test sequence.
        #[arg(long)]
        y_search: bool,
        /// Report the raw window infimum without extrapolation.
        #[arg(long)]
        no_extrapolate: bool,
    },
    /// Compare the closed-form power-mean constants with estimates.
    HardyTable {
        /// Comma-separated exponents.
        #[arg(long, allow_hyphen_values = true, default_value = DEFAULT_TABLE_PS)]
        p: String,
        #[arg(long, default_value_t = 200_000)]
        n_max: usize,
    },
    /// Rearrange a weighted sequence to nonincreasing order and check both inequalities.
    Rearrange {
        /// Mean used for the rearrangement inequality.
        #[arg(default_value = "arithmetic")]
        spec: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        w: Option<String>,
    },
    /// Random checks of the four mean axioms.
    FuzzAxioms {
        spec: String,
        #[arg(long, value_enum, default_value = "exact")]
        mode: FuzzMode,
        #[arg(long, default_value_t = 1_000)]
        trials: u64,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug)]
enum Failure {
    Parse(String),
    Domain(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_parse() {
            Failure::Parse(e.to_string())
        } else {
            Failure::Domain(e.to_string())
        }
    }
}

/// Rendered report and whether its assertion held.
struct Outcome {
    text: String,
    ok: bool,
}

fn parse_spec(s: &str) -> Result<MeanSpec, Failure> {
    Ok(s.parse::<MeanSpec>()?)
}

fn parse_numbers(s: &str) -> Result<Vec<Numeric>, Failure> {
    s.split(',')
        .map(|t| t.parse::<Numeric>().map_err(Failure::from))
        .collect()
}

fn parse_pair(x: &str, w: Option<&str>) -> Result<(EntryVector, WeightVector), Failure> {
    let x = EntryVector::new(parse_numbers(x)?)?;
    let w = match w {
        Some(w) => WeightVector::new(parse_numbers(w)?)?,
        None => WeightVector::ones(x.len()),
    };
    Ok((x, w))
}

fn parse_exponents(s: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|t| {
            let spec = parse_spec(&format!("power:{}", t.trim()))?;
            Ok(spec.power_exponent().expect("power spec"))
        })
        .collect()
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn verdict(c: &CheckResult) -> &'static str {
    if c.passed {
        "pass"
    } else {
        "FAIL"
    }
}

fn cmd_eval(spec: &str, x: &str, w: Option<&str>, format: Format) -> Result<Outcome, Failure> {
    let spec = parse_spec(spec)?;
    let (x, w) = parse_pair(x, w)?;
    let value = eval_mean(&spec, &x, &w)?;
    #[derive(Serialize)]
    struct Report<'a> {
        spec: MeanSpec,
        x: &'a EntryVector,
        weights: &'a WeightVector,
        exact: bool,
        value: &'a Numeric,
    }
    let text = match format {
        Format::Plain => format!("{value}\n"),
        Format::Csv => format!("spec,value\n{},{}\n", csv_field(&spec.to_string()), value),
        Format::Json => to_json(&Report {
            spec,
            x: &x,
            weights: &w,
            exact: value.is_exact(),
            value: &value,
        }),
    };
    Ok(Outcome { text, ok: true })
}

fn cmd_kedlaya(
    spec: &str,
    mode: KedlayaMode,
    trials: u64,
    n_max: usize,
    seed: u64,
    expect_violation: bool,
    format: Format,
) -> Result<Outcome, Failure> {
    let spec = parse_spec(spec)?;
    let mode = match mode {
        KedlayaMode::V => WeightMode::VOnly,
        KedlayaMode::W0 => WeightMode::W0,
    };
    let report = fuzz_kedlaya(&spec, n_max, trials, mode, seed)?;
    let found = report.violations > 0;
    let text = match format {
        Format::Json => to_json(&report),
        Format::Csv => format!(
            "spec,mode,trials,n_max,seed,min_gap,violations\n{},{},{},{},{},{},{}\n",
            csv_field(&spec.to_string()),
            if mode == WeightMode::VOnly { "v" } else { "w0" },
            trials,
            n_max,
            seed,
            f(report.min_gap),
            report.violations
        ),
        Format::Plain => {
            let mut s = format!(
                "spec {spec}, {trials} trials, n <= {n_max}, seed {seed}\nmin_gap {}\nviolations {}\n",
                f(report.min_gap),
                report.violations
            );
            if let (true, Some(inst)) = (found, &report.worst_instance) {
                let list = |v: &[Numeric]| v.iter().map(Numeric::to_string).collect::<Vec<_>>().join(",");
                let _ = writeln!(s, "worst x = {}", list(inst.x.as_slice()));
                let _ = writeln!(s, "worst w = {}", list(inst.lambda.as_slice()));
            }
            s
        }
    };
    Ok(Outcome {
        text,
        ok: found == expect_violation,
    })
}

fn cmd_hardy_estimate(
    spec: &str,
    weights: &str,
    n: usize,
    y_search: bool,
    no_extrapolate: bool,
    format: Format,
) -> Result<Outcome, Failure> {
    let spec = parse_spec(spec)?;
    let family: WeightFamily = weights.parse()?;
    let opts = EstimateOptions {
        y_search,
        extrapolate: !no_extrapolate,
        ..EstimateOptions::with_n_max(n)
    };
    let est = est_lambda(&spec, &family, &opts)?;
    let text = match format {
        Format::Json => to_json(&est),
        Format::Plain => format!("{}\n", f(est.value)),
        Format::Csv => format!(
            "spec,weights,n_max,value,window_infimum,divergent,y\n{},{},{},{},{},{},{}\n",
            csv_field(&spec.to_string()),
            csv_field(&family.to_string()),
            est.n_used,
            f(est.value),
            f(est.window_infimum),
            est.divergent,
            f(est.y)
        ),
    };
    Ok(Outcome { text, ok: true })
}

/// `(estimate, abs_error, rel_error)` columns of a table row.
fn table_cells(row: &HardyTableRow) -> (String, String, String) {
    let opt = |v: Option<f64>| v.map(f).unwrap_or_default();
    let estimate = if row.closed_form.is_infinite() || row.estimate.divergent {
        "divergent".to_string()
    } else {
        f(row.estimate.value)
    };
    (estimate, opt(row.abs_error), opt(row.rel_error))
}

fn cmd_hardy_table(ps: &str, n_max: usize, format: Format) -> Result<Outcome, Failure> {
    let ps = parse_exponents(ps)?;
    let rows = hardy_table(&ps, n_max)?;
    let text = match format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut s = String::from("p,closed_form,estimate,n_max,abs_error,rel_error\n");
            for r in &rows {
                let (e, a, rel) = table_cells(r);
                let _ = writeln!(s, "{},{},{},{},{},{}", f(r.p), f(r.closed_form), e, n_max, a, rel);
            }
            s
        }
        Format::Plain => {
            let mut s = format!(
                "{:>8}  {:>20}  {:>20}  {:>10}  {:>12}\n",
                "p", "closed_form", "estimate", "n_max", "rel_error"
            );
            for r in &rows {
                let (e, _, rel) = table_cells(r);
                let _ = writeln!(
                    s,
                    "{:>8}  {:>20}  {:>20}  {:>10}  {:>12}",
                    f(r.p),
                    f(r.closed_form),
                    e,
                    n_max,
                    rel
                );
            }
            s
        }
    };
    Ok(Outcome { text, ok: true })
}

#[derive(Serialize)]
struct RearrangeReport<'a> {
    spec: MeanSpec,
    x: &'a EntryVector,
    weights: &'a WeightVector,
    elimination: &'a Elimination,
    result: &'a RearrangementResult,
    equidistribution: CheckResult,
    mass_balance: CheckResult,
    inequality: CheckResult,
}

fn cmd_rearrange(spec: &str, x: &str, w: Option<&str>, format: Format) -> Result<Outcome, Failure> {
    let spec = parse_spec(spec)?;
    let (x, w) = parse_pair(x, w)?;
    let kept = eliminate_zero_weights(&x, &w)?;
    let result = rearrange_pair(&kept.x, &kept.lambda)?;
    let report = RearrangeReport {
        spec,
        x: &x,
        weights: &w,
        elimination: &kept,
        equidistribution: check_equidistribution(&kept.x, &kept.lambda, &result),
        mass_balance: check_mass_balance(&kept.x, &kept.lambda, &result),
        inequality: check_rearrangement_inequality(&spec, &kept.x, &kept.lambda, &result)?,
        result: &result,
    };
    let ok = report.equidistribution.passed && report.mass_balance.passed && report.inequality.passed;
    let cumulative = |w: &WeightVector| -> Vec<String> { w.partial_sums().iter().map(Numeric::to_string).collect() };
    let text = match format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut s = String::from("side,index,value,weight,cumulative\n");
            for (side, v, wt) in [("before", &kept.x, &kept.lambda), ("after", &result.y, &result.psi)] {
                for (i, ((a, b), c)) in v.iter().zip(wt.iter()).zip(cumulative(wt)).enumerate() {
                    let _ = writeln!(s, "{side},{},{a},{b},{c}", i + 1);
                }
            }
            s
        }
        Format::Plain => {
            let mut s = String::new();
            if !kept.removed.is_empty() {
                let idx: Vec<String> = kept.removed.iter().map(|i| (i + 1).to_string()).collect();
                let _ = writeln!(s, "eliminated zero-weight entries: {}", idx.join(","));
            }
            for (title, v, wt) in [("before", &kept.x, &kept.lambda), ("after", &result.y, &result.psi)] {
                let _ = writeln!(
                    s,
                    "{title}\n{:>4}  {:>12}  {:>12}  {:>12}",
                    "n", "value", "weight", "cumulative"
                );
                for (i, ((a, b), c)) in v.iter().zip(wt.iter()).zip(cumulative(wt)).enumerate() {
                    let _ = writeln!(
                        s,
                        "{:>4}  {:>12}  {:>12}  {:>12}",
                        i + 1,
                        a.to_string(),
                        b.to_string(),
                        c
                    );
                }
            }
            let map: Vec<String> = result.index_map.iter().map(usize::to_string).collect();
            let _ = writeln!(s, "index map: {}", map.join(","));
            let _ = writeln!(s, "equidistribution: {}", verdict(&report.equidistribution));
            let _ = writeln!(s, "mass balance: {}", verdict(&report.mass_balance));
            let _ = writeln!(
                s,
                "rearrangement inequality ({spec}): {} (margin {})",
                verdict(&report.inequality),
                f(report.inequality.abs_gap)
            );
            s
        }
    };
    Ok(Outcome { text, ok })
}

fn cmd_fuzz_axioms(
    spec: &str,
    mode: FuzzMode,
    trials: u64,
    n_max: usize,
    seed: u64,
    format: Format,
) -> Result<Outcome, Failure> {
    let spec = parse_spec(spec)?;
    let mode = match mode {
        FuzzMode::Exact => SampleMode::Exact,
        FuzzMode::Float => SampleMode::Float,
    };
    let report = fuzz_axioms(&spec, mode, trials, n_max, seed)?;
    let tallies = [
        ("nullhomogeneity", &report.nullhomogeneity),
        ("reduction", &report.reduction),
        ("mean_value", &report.mean_value),
        ("elimination", &report.elimination),
    ];
    let text = match format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut s = String::from("axiom,checked,failures,worst_rel_gap\n");
            for (name, t) in tallies {
                let _ = writeln!(s, "{name},{},{},{}", t.checked, t.failures, f(t.worst_rel_gap));
            }
            s
        }
        Format::Plain => {
            let mut s = format!("spec {spec}, {trials} trials, seed {seed}\n");
            for (name, t) in tallies {
                let _ = writeln!(
                    s,
                    "{name:<16} checked {:>6}  failures {:>4}  worst rel gap {}",
                    t.checked,
                    t.failures,
                    f(t.worst_rel_gap)
                );
            }
            s
        }
    };
    Ok(Outcome {
        text,
        ok: report.failures() == 0,
    })
}

fn run(cli: Cli) -> Result<Outcome, Failure> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure::Domain(format!("thread pool: {e}")))?;
    }
    let fmt = |default| cli.format.unwrap_or(default);
    match &cli.command {
        Command::Eval { spec, x, w } => cmd_eval(spec, x, w.as_deref(), fmt(Format::Plain)),
        Command::Kedlaya {
            spec,
            mode,
            trials,
            n_max,
            seed,
            expect_violation,
        } => cmd_kedlaya(
            spec,
            *mode,
            *trials,
            *n_max,
            *seed,
            *expect_violation,
            fmt(Format::Json),
        ),
        Command::HardyEstimate {
            spec,
            weights,
            n,
            y_search,
            no_extrapolate,
        } => cmd_hardy_estimate(spec, weights, *n, *y_search, *no_extrapolate, fmt(Format::Json)),
        Command::HardyTable { p, n_max } => cmd_hardy_table(p, *n_max, fmt(Format::Csv)),
        Command::Rearrange { spec, x, w } => cmd_rearrange(spec, x, w.as_deref(), fmt(Format::Plain)),
        Command::FuzzAxioms {
            spec,
            mode,
            trials,
            n_max,
            seed,
        } => cmd_fuzz_axioms(spec, *mode, *trials, *n_max, *seed, fmt(Format::Json)),
    }
    .and_then(|out| {
        if let Some(path) = &cli.output {
            std::fs::write(path, &out.text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            Ok(Outcome {
                text: String::new(),
                ok: out.ok,
            })
        } else {
            Ok(out)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.text.as_bytes());
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_ASSERTION)
            }
        }
        Err(f) => {
            let (code, msg) = match f {
                Failure::Parse(m) => (EXIT_PARSE, m),
                Failure::Domain(m) => (EXIT_DOMAIN, m),
                Failure::Io(m) => (EXIT_DOMAIN, m),
            };
            eprintln!("hardy-means: {msg}");
            ExitCode::from(code)
        }
    }
}
