//! `analyze`, `extend` and `da`: commands over a series file.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use av1324_analysis::diffapprox::{
    da_table, ensemble_extend, power_law_diagnostic, DaInput, DaRow, EnsembleOptions, PowerLawDiagnostic,
};
use av1324_analysis::hp::{self, format_sci, Real};
use av1324_analysis::report::{analyze as run_report, Report, ReportOptions};
use av1324_analysis::series::{Series, OUTPUT_DIGITS};
use av1324_analysis::seriesanalysis::renormalize;

use crate::manifest::RunManifest;
use crate::{io_error, read_series_file, with_threads, write_file, CliError};

/// Exact terms below which an ensemble is not attempted.
pub const MIN_EXTEND_TERMS: usize = 20;
/// Digits kept when real coefficients are integerized for exact fitting.
pub const DA_DIGITS: usize = 30;
/// Working precision of root finding in `da`.
pub const DA_PRECISION: usize = 30;

fn parse_real(flag: &str, s: &str, prec: usize) -> Result<Real, CliError> {
    hp::parse(s, prec).ok_or_else(|| CliError::Usage(format!("{flag}: not a number: {s:?}")))
}

#[derive(Debug, Clone)]
pub struct AnalyzeArgs {
    pub series: PathBuf,
    pub mu: Option<String>,
    pub sigma: Option<String>,
    pub outdir: PathBuf,
    pub precision: usize,
    pub ratio_cutoff: usize,
    pub threads: usize,
}

/// Every trace as CSV plus `summary.json`, and `manifest.json` over them.
pub fn analyze(args: &AnalyzeArgs) -> Result<(Report, RunManifest), CliError> {
    let start = Instant::now();
    let prec = args.precision;
    let s = read_series_file(&args.series, prec)?;
    let mut opts = ReportOptions::new(prec);
    opts.ratio_cutoff = args.ratio_cutoff;
    if let Some(mu) = &args.mu {
        opts.mu = Some(parse_real("--mu", mu, prec)?);
    }
    if let Some(sigma) = &args.sigma {
        opts.sigma = parse_real("--sigma", sigma, prec)?;
    }
    let report = with_threads(args.threads, || run_report(&s, &opts))??;
    let files = report.write(&args.outdir, prec).map_err(io_error(&args.outdir))?;

    let mut m = RunManifest::new("analyze");
    m.param("series", args.series.display().to_string())
        .param("mu", args.mu.clone())
        .param("sigma", args.sigma.clone())
        .param("precision", prec)
        .param("cutoff_ratio_index", args.ratio_cutoff);
    for f in &files {
        m.record(f).map_err(io_error(f))?;
    }
    m.finish(start.elapsed());
    let path = args.outdir.join("manifest.json");
    m.write(&path).map_err(io_error(&path))?;
    Ok((report, m))
}

#[derive(Debug, Clone)]
pub struct ExtendArgs {
    pub series: PathBuf,
    pub count: usize,
    /// Ratios to predict; defaults to `count`.
    pub ratio_count: Option<usize>,
    pub outdir: PathBuf,
    pub precision: usize,
    pub threads: usize,
}

/// Predicts coefficients and ratios beyond the exact terms of `s`.
pub fn extend_series(s: &Series, count: usize, ratio_count: usize, precision: usize) -> Result<Series, CliError> {
    if s.exact_len() < MIN_EXTEND_TERMS {
        return Err(CliError::TooFewApproximants {
            got: s.exact_len(),
            needed: MIN_EXTEND_TERMS,
        });
    }
    let mut exact = s.clone();
    exact.extended.clear();
    exact.extended_ratios.clear();
    let opts = EnsembleOptions {
        precision,
        ..EnsembleOptions::default()
    };
    Ok(ensemble_extend(&exact, &opts, count, ratio_count)?)
}

/// Writes `extended.txt` (exact terms, then predictions as comment lines)
/// and `manifest.json` into the output directory.
pub fn extend(args: &ExtendArgs) -> Result<(Series, RunManifest), CliError> {
    let start = Instant::now();
    let s = read_series_file(&args.series, args.precision)?;
    let ratio_count = args.ratio_count.unwrap_or(args.count);
    let out = with_threads(args.threads, || {
        extend_series(&s, args.count, ratio_count, args.precision)
    })??;
    let path = args.outdir.join("extended.txt");
    let mut text = Vec::new();
    out.write(&mut text).expect("write to memory");
    write_file(&path, &text)?;

    let mut m = RunManifest::new("extend");
    m.param("series", args.series.display().to_string())
        .param("count", args.count)
        .param("ratio_count", ratio_count)
        .param("precision", args.precision);
    m.record(&path).map_err(io_error(&path))?;
    m.finish(start.elapsed());
    let mpath = args.outdir.join("manifest.json");
    m.write(&mpath).map_err(io_error(&mpath))?;
    Ok((out, m))
}

#[derive(Debug, Clone)]
pub struct DaRun {
    pub renormalized: bool,
    pub rows: Vec<DaRow>,
    pub diagnostic: PowerLawDiagnostic,
}

/// The approximant input for `s`: `1, p_1, p_2, ...` raw, or the
/// renormalized `d_2, d_3, ...`.
pub fn da_input(s: &Series, renormalized: bool, prec: usize) -> Result<DaInput, CliError> {
    let coeffs = s.coefficients(Some(s.exact_len()));
    let values: Vec<Real> = if renormalized {
        renormalize(&coeffs, prec)?.into_iter().map(|p| p.value).collect()
    } else {
        std::iter::once(hp::int(1, prec))
            .chain(coeffs.into_iter().map(|p| p.value))
            .collect()
    };
    Ok(DaInput::from_reals(&values, DA_DIGITS))
}

/// Approximant table over the exact terms of `s`.
pub fn da_run(
    s: &Series,
    renormalized: bool,
    orders: &[usize],
    l_max: i64,
    min_fraction: f64,
) -> Result<DaRun, CliError> {
    if orders.is_empty() || orders.contains(&0) {
        return Err(CliError::Usage("--orders needs positive orders".into()));
    }
    if l_max < 0 {
        return Err(CliError::Usage("--lmax must be non-negative".into()));
    }
    let input = da_input(s, renormalized, s.precision)?;
    let rows = da_table(&input, orders, l_max, min_fraction, DA_PRECISION);
    let diagnostic = power_law_diagnostic(&rows);
    Ok(DaRun {
        renormalized,
        rows,
        diagnostic,
    })
}

fn opt_f64(x: &Option<Real>) -> String {
    x.as_ref().map_or("-".into(), |v| format!("{:.9}", hp::to_f64(v)))
}

impl DaRun {
    /// One line per `(L, order)`: member count, mean location and exponent.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let input = if self.renormalized { "renormalized" } else { "raw" };
        writeln!(out, "# {input} input").unwrap();
        writeln!(
            out,
            "{:>3} {:>5} {:>7} {:>7} {:>14} {:>14}",
            "L", "order", "members", "skipped", "singularity", "exponent"
        )
        .unwrap();
        for r in &self.rows {
            writeln!(
                out,
                "{:>3} {:>5} {:>7} {:>7} {:>14} {:>14}",
                r.l,
                r.order,
                r.members.len(),
                r.skipped,
                opt_f64(&r.mean_location),
                opt_f64(&r.mean_exponent)
            )
            .unwrap();
        }
        let d = &self.diagnostic;
        writeln!(
            out,
            "members {}, singularity median {:.6} spread {:.2e}, exponent median {:.4} spread {:.3} range [{:.3}, {:.3}]",
            d.members, d.location_median, d.location_spread, d.exponent_median, d.exponent_spread, d.exponent_min, d.exponent_max
        )
        .unwrap();
        let verdict = if d.power_law {
            "power law"
        } else {
            "NOT a power law: exponents scattered"
        };
        writeln!(out, "{verdict}").unwrap();
        out
    }

    /// Every member: configuration, location and exponent at full precision.
    pub fn members_csv(&self) -> String {
        let mut out = String::from("l,order,degrees,location,exponent\n");
        for r in &self.rows {
            for m in &r.members {
                let degrees: Vec<String> = m.config.degrees.iter().map(|d| d.to_string()).collect();
                let exponent = m
                    .exponent
                    .as_ref()
                    .map_or(String::new(), |e| format_sci(e, OUTPUT_DIGITS));
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    r.l,
                    r.order,
                    degrees.join(" "),
                    format_sci(&m.location, OUTPUT_DIGITS),
                    exponent
                )
                .unwrap();
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct DaArgs {
    pub series: PathBuf,
    pub renormalize: bool,
    pub orders: Vec<usize>,
    pub l_max: i64,
    pub min_fraction: f64,
    pub outdir: Option<PathBuf>,
    pub precision: usize,
    pub threads: usize,
}

/// Writes `da_table.txt`, `da_members.csv`, `diagnostic.json` and
/// `manifest.json` when an output directory is given.
pub fn da(args: &DaArgs) -> Result<(DaRun, Option<RunManifest>), CliError> {
    let start = Instant::now();
    let s = read_series_file(&args.series, args.precision)?;
    let run = with_threads(args.threads, || {
        da_run(&s, args.renormalize, &args.orders, args.l_max, args.min_fraction)
    })??;
    let Some(dir) = &args.outdir else {
        return Ok((run, None));
    };
    let diagnostic = serde_json::to_string_pretty(&run.diagnostic).expect("serializable") + "\n";
    let files: Vec<(PathBuf, String)> = vec![
        (dir.join("da_table.txt"), run.table()),
        (dir.join("da_members.csv"), run.members_csv()),
        (dir.join("diagnostic.json"), diagnostic),
    ];
    let mut m = RunManifest::new("da");
    m.param("series", args.series.display().to_string())
        .param("renormalize", args.renormalize)
        .param("orders", args.orders.clone())
        .param("lmax", args.l_max)
        .param("min_fraction", args.min_fraction);
    for (path, text) in &files {
        write_file(path, text.as_bytes())?;
        m.record(path).map_err(io_error(path))?;
    }
    m.finish(start.elapsed());
    let mpath = dir.join("manifest.json");
    m.write(&mpath).map_err(io_error(&mpath))?;
    Ok((run, Some(m)))
}
