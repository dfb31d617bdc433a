//! Every ratio and fit trace of a series, as CSV files plus a JSON summary of
//! the settled estimates.
//!
//! Predicted terms carry error bars. Each trace is recomputed with the
//! predicted terms moved by their error bars (all up, all down, and with
//! alternating signs), and the largest change is the propagated error of a
//! point. An estimate is read off at the last point whose propagated error
//! stays below `visible_error` times its value.

use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

use crate::hp::{self, format_sci, Real};
use crate::series::{Point, Predicted, Series, OUTPUT_DIGITS};
use crate::seriesanalysis::{
    confluent_log_test, extrapolate_trace, fit_log_four, fit_log_three, fit_ratio_three, modified_from_ratios,
    sigma_gradient, AnalysisError,
};

/// Default last ratio index entering the analysis.
pub const DEFAULT_RATIO_CUTOFF: usize = 240;
/// Default relative size of a propagated error that makes a point unusable.
pub const DEFAULT_VISIBLE_ERROR: f64 = 1e-3;
/// Estimates of `1 - σ` above this carry no stretched-exponential signal.
pub const NO_SIGNAL_THRESHOLD: f64 = 0.75;

#[derive(Debug, Clone)]
pub struct ReportOptions {
    /// Growth constant for the fits that need one; the settled modified-ratio
    /// estimate when absent.
    pub mu: Option<Real>,
    pub sigma: Real,
    pub ratio_cutoff: usize,
    pub visible_error: f64,
    pub precision: usize,
}

impl ReportOptions {
    pub fn new(precision: usize) -> Self {
        ReportOptions {
            mu: None,
            sigma: hp::ratio(1, 2, precision),
            ratio_cutoff: DEFAULT_RATIO_CUTOFF,
            visible_error: DEFAULT_VISIBLE_ERROR,
            precision,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub name: &'static str,
    /// Abscissa is `n^{-power}`.
    pub power: Real,
    pub points: Vec<Point>,
    /// Propagated error of each point; zero for points from exact terms.
    pub errors: Vec<f64>,
}

impl Trace {
    fn new(name: &'static str, power: Real, points: Vec<Point>) -> Self {
        let errors = vec![0.0; points.len()];
        Trace {
            name,
            power,
            points,
            errors,
        }
    }

    /// The last point whose propagated error is below `tol` times its value.
    pub fn settled(&self, tol: f64) -> Option<(&Point, f64)> {
        self.points
            .iter()
            .zip(&self.errors)
            .rev()
            .find(|(p, e)| {
                let v = hp::to_f64(&p.value).abs();
                v.is_finite() && **e <= tol * v
            })
            .map(|(p, e)| (p, *e))
    }

    pub fn write_csv(&self, mut w: impl Write, prec: usize) -> io::Result<()> {
        writeln!(w, "n,abscissa,value,is_predicted")?;
        for p in &self.points {
            let x = hp::powf(&hp::int(p.n as i64, prec), &-self.power.clone());
            writeln!(
                w,
                "{},{},{},{}",
                p.n,
                format_sci(&x, OUTPUT_DIGITS),
                format_sci(&p.value, OUTPUT_DIGITS),
                p.predicted
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub method: &'static str,
    /// Index of the point the estimate is read from.
    pub n: usize,
    pub predicted: bool,
    pub error: f64,
    pub mu: Option<String>,
    pub mu1: Option<String>,
    pub g: Option<String>,
    pub b: Option<String>,
    pub sigma: Option<String>,
    /// The trace value itself when it is none of the above.
    pub value: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub exact_terms: usize,
    pub predicted_terms: usize,
    pub predicted_ratios: usize,
    pub ratio_cutoff: usize,
    /// Growth constant used by the mu-dependent traces, if any.
    pub mu: Option<String>,
    pub mu_source: &'static str,
    pub sigma: String,
    pub stretched_exponential_signal: Option<bool>,
    pub estimates: Vec<Estimate>,
    /// Traces cut short, with the reason.
    pub notes: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub traces: Vec<Trace>,
    pub summary: Summary,
}

impl Report {
    pub fn trace(&self, name: &str) -> Option<&Trace> {
        self.traces.iter().find(|t| t.name == name)
    }

    /// One `<name>.csv` per trace and `summary.json`.
    pub fn write(&self, dir: &Path, prec: usize) -> io::Result<Vec<std::path::PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut files = Vec::new();
        for t in &self.traces {
            let path = dir.join(format!("{}.csv", t.name));
            let mut buf = Vec::new();
            t.write_csv(&mut buf, prec)?;
            std::fs::write(&path, buf)?;
            files.push(path);
        }
        let path = dir.join("summary.json");
        let mut text = serde_json::to_string_pretty(&self.summary).map_err(io::Error::other)?;
        text.push('\n');
        std::fs::write(&path, text)?;
        files.push(path);
        Ok(files)
    }
}

fn fmt(x: &Real) -> String {
    format_sci(x, OUTPUT_DIGITS)
}

/// Predicted terms moved by `sign(i)` error bars.
fn shifted(s: &Series, sign: impl Fn(usize) -> i64) -> Series {
    let shift = |v: &[Predicted]| -> Vec<Predicted> {
        v.iter()
            .enumerate()
            .map(|(i, p)| Predicted {
                value: &p.value + hp::int(sign(i), s.precision) * &p.errbar,
                errbar: p.errbar.clone(),
            })
            .collect()
    };
    Series {
        exact: s.exact.clone(),
        extended: shift(&s.extended),
        extended_ratios: shift(&s.extended_ratios),
        precision: s.precision,
    }
}

/// Ratios up to the cutoff, ending before the first non-positive one.
fn cut_ratios(s: &Series, cutoff: usize) -> Vec<Point> {
    s.ratio_points(Some(cutoff))
        .into_iter()
        .take_while(|p| hp::is_positive(&p.value))
        .collect()
}

fn cut_coefficients(s: &Series, cutoff: usize) -> Vec<Point> {
    s.coefficients(Some(cutoff))
        .into_iter()
        .take_while(|p| hp::is_positive(&p.value))
        .collect()
}

/// Traces that need no growth constant.
fn free_traces(s: &Series, opts: &ReportOptions, notes: &mut Vec<String>) -> Vec<Trace> {
    let prec = opts.precision;
    let half = hp::ratio(1, 2, prec);
    let one = hp::int(1, prec);
    let r = cut_ratios(s, opts.ratio_cutoff);
    let l = modified_from_ratios(&r, prec);
    let mut out = vec![
        Trace::new("ratios_vs_1_over_n", one.clone(), r.clone()),
        Trace::new("ratios_vs_1_over_sqrt_n", half.clone(), r.clone()),
    ];
    let mut extrapolated = |name, pts: &[Point]| match extrapolate_trace(pts, &half, prec) {
        Ok(e) => out.push(Trace::new(name, half.clone(), e)),
        Err(e) => notes.push(format!("{name}: {e}")),
    };
    extrapolated("ratio_extrapolants", &r);
    extrapolated("modified_ratio_extrapolants", &l);
    out.push(Trace::new("modified_ratios", half.clone(), l));
    let coeffs = cut_coefficients(s, opts.ratio_cutoff);
    let mut mu = Vec::new();
    let last = coeffs.last().map_or(0, |p| p.n);
    for n in 3..last {
        match fit_log_four(&coeffs, &opts.sigma, n, prec) {
            Ok(f) => mu.push(Point {
                n,
                value: f.derived.mu.unwrap(),
                predicted: f.predicted,
            }),
            Err(e) => {
                notes.push(format!("log_fit_mu: {e}"));
                break;
            }
        }
    }
    out.push(Trace::new("log_fit_mu", one, mu));
    out
}

/// The ratios up to the first one on the other side of `μ` from the last
/// exact ratio.
fn same_side(r: &[Point], exact_len: usize, mu: &Real) -> Vec<Point> {
    let side = |p: &Point| p.value.partial_cmp(mu);
    let reference = r.iter().rev().find(|p| p.n <= exact_len).or(r.last()).and_then(side);
    r.iter().take_while(|p| side(p) == reference).cloned().collect()
}

/// Traces at a given growth constant.
fn mu_traces(s: &Series, mu: &Real, opts: &ReportOptions, notes: &mut Vec<String>) -> Vec<Trace> {
    let prec = opts.precision;
    let half = hp::ratio(1, 2, prec);
    let one = hp::int(1, prec);
    let three_halves = hp::ratio(3, 2, prec);
    let all = cut_ratios(s, opts.ratio_cutoff);
    let r = same_side(&all, s.exact_len(), mu);
    if r.len() < all.len() {
        notes.push(format!(
            "ratios cross mu after n = {}; later ratios are left out of the mu-dependent traces",
            r.last().map_or(0, |p| p.n)
        ));
    }
    let mut out = Vec::new();
    match sigma_gradient(&r, mu, prec) {
        Ok(sg) => out.push(Trace::new("sigma_estimates", half.clone(), sg)),
        Err(e) => notes.push(format!("sigma_estimates: {e}")),
    }
    let (mut c1, mut c2) = (Vec::new(), Vec::new());
    let last = r.last().map_or(0, |p| p.n);
    for k in 3..last {
        if let Ok(f) = fit_ratio_three(&r, mu, k, prec) {
            c1.push(Point {
                n: k,
                value: f.c[0].clone(),
                predicted: f.predicted,
            });
            c2.push(Point {
                n: k,
                value: f.c[1].clone(),
                predicted: f.predicted,
            });
        }
    }
    for (name, trace, power) in [
        ("c1_extrapolants", &c1, three_halves.clone()),
        ("c2_extrapolants", &c2, one.clone()),
    ] {
        match extrapolate_trace(trace, &power, prec) {
            Ok(e) => out.push(Trace::new(name, power, e)),
            Err(e) => notes.push(format!("{name}: {e}")),
        }
    }
    out.push(Trace::new("c1", three_halves, c1));
    out.push(Trace::new("c2", one.clone(), c2));
    let coeffs = cut_coefficients(s, opts.ratio_cutoff);
    let mut mu1 = Vec::new();
    let last = coeffs.last().map_or(0, |p| p.n);
    for n in 2..last {
        match fit_log_three(&coeffs, &opts.sigma, mu, n, prec) {
            Ok(f) => mu1.push(Point {
                n,
                value: f.derived.mu1.unwrap(),
                predicted: f.predicted,
            }),
            Err(_) => break,
        }
    }
    out.push(Trace::new("log_fit_three_mu1", one.clone(), mu1));
    match confluent_log_test(&coeffs, mu, prec) {
        Ok(cf) => {
            match extrapolate_trace(&cf, &one, prec) {
                Ok(e) => out.push(Trace::new("confluent_extrapolants", one.clone(), e)),
                Err(e) => notes.push(format!("confluent_extrapolants: {e}")),
            }
            out.push(Trace::new("confluent", one, cf));
        }
        Err(e) => notes.push(format!("confluent: {e}")),
    }
    out
}

/// Fills in propagated errors from the same traces computed on shifted
/// copies of the series.
fn propagate(central: &mut [Trace], variants: &[Vec<Trace>]) {
    for t in central.iter_mut() {
        for (i, p) in t.points.iter().enumerate() {
            if !p.predicted {
                continue;
            }
            let mut err: f64 = 0.0;
            for v in variants {
                let other = v
                    .iter()
                    .find(|o| o.name == t.name)
                    .and_then(|o| o.points.iter().find(|q| q.n == p.n));
                err = err.max(match other {
                    Some(q) => hp::to_f64(&hp::abs(&(&q.value - &p.value))),
                    None => f64::INFINITY,
                });
            }
            t.errors[i] = err;
        }
    }
}

fn with_errors(
    s: &Series,
    compute: impl Fn(&Series, &mut Vec<String>) -> Vec<Trace>,
    notes: &mut Vec<String>,
) -> Vec<Trace> {
    let mut central = compute(s, notes);
    if !s.extended.is_empty() || !s.extended_ratios.is_empty() {
        let signs: [fn(usize) -> i64; 4] = [|_| 1, |_| -1, |i| 1 - 2 * (i as i64 % 2), |i| 2 * (i as i64 % 2) - 1];
        let variants: Vec<Vec<Trace>> = signs.iter().map(|f| compute(&shifted(s, f), &mut Vec::new())).collect();
        propagate(&mut central, &variants);
    }
    central
}

/// Runs every trace and collects the settled estimates.
pub fn analyze(s: &Series, opts: &ReportOptions) -> Result<Report, AnalysisError> {
    let prec = opts.precision;
    if s.total_len() < 2 {
        return Err(AnalysisError::InsufficientLength {
            needed: 2,
            available: s.total_len(),
        });
    }
    let tol = opts.visible_error;
    let mut notes = Vec::new();
    let mut traces = with_errors(s, |s, n| free_traces(s, opts, n), &mut notes);
    let find = |traces: &[Trace], name: &str| traces.iter().position(|t| t.name == name);
    let mut estimates = Vec::new();
    let settled = |t: &Trace| t.settled(tol).map(|(p, e)| (p.clone(), e));
    let base = |method, p: &Point, e: f64| Estimate {
        method,
        n: p.n,
        predicted: p.predicted,
        error: e,
        mu: None,
        mu1: None,
        g: None,
        b: None,
        sigma: None,
        value: None,
    };
    for (method, name) in [
        ("ratio_extrapolation", "ratio_extrapolants"),
        ("modified_ratio_extrapolation", "modified_ratio_extrapolants"),
    ] {
        if let Some((p, e)) = find(&traces, name).and_then(|i| settled(&traces[i])) {
            estimates.push(Estimate {
                mu: Some(fmt(&p.value)),
                ..base(method, &p, e)
            });
        }
    }
    if let Some((p, e)) = find(&traces, "log_fit_mu").and_then(|i| settled(&traces[i])) {
        let coeffs = cut_coefficients(s, opts.ratio_cutoff);
        let f = fit_log_four(&coeffs, &opts.sigma, p.n, prec)?;
        let d = f.derived;
        estimates.push(Estimate {
            mu: d.mu.as_ref().map(fmt),
            mu1: d.mu1.as_ref().map(fmt),
            g: d.g.as_ref().map(fmt),
            b: d.b.as_ref().map(fmt),
            sigma: Some(fmt(&opts.sigma)),
            ..base("log_fit_four", &p, e)
        });
    }
    let chosen = match &opts.mu {
        Some(m) => Some((hp::set_precision(m, prec), "given")),
        None => [
            ("log_fit_mu", "log_fit_four"),
            ("modified_ratio_extrapolants", "modified_ratio_extrapolation"),
            ("ratio_extrapolants", "ratio_extrapolation"),
        ]
        .into_iter()
        .find_map(|(name, source)| {
            let (p, _) = find(&traces, name).and_then(|i| settled(&traces[i]))?;
            Some((p.value, source))
        }),
    };
    let Some((mu, mu_source)) = chosen else {
        notes.push("no settled estimate of mu; mu-dependent traces skipped".into());
        return Ok(Report {
            traces,
            summary: Summary {
                exact_terms: s.exact_len(),
                predicted_terms: s.extended.len(),
                predicted_ratios: s.extended_ratios.len(),
                ratio_cutoff: opts.ratio_cutoff,
                mu: None,
                mu_source: "none",
                sigma: fmt(&opts.sigma),
                stretched_exponential_signal: None,
                estimates,
                notes,
            },
        });
    };
    let more = with_errors(s, |s, n| mu_traces(s, &mu, opts, n), &mut notes);
    traces.extend(more);
    let mut signal = None;
    if let Some((p, e)) = find(&traces, "sigma_estimates").and_then(|i| settled(&traces[i])) {
        signal = Some(hp::to_f64(&p.value) < NO_SIGNAL_THRESHOLD);
        estimates.push(Estimate {
            sigma: Some(fmt(&(hp::int(1, prec) - &p.value))),
            value: Some(fmt(&p.value)),
            ..base("sigma_gradient", &p, e)
        });
    }
    let c1 = find(&traces, "c1_extrapolants").and_then(|i| settled(&traces[i]));
    let c2 = find(&traces, "c2_extrapolants").and_then(|i| settled(&traces[i]));
    if let Some((p, e)) = &c1 {
        let log_mu1 = hp::int(2, prec) * &p.value;
        let g = c2
            .as_ref()
            .map(|(q, _)| &q.value - &log_mu1 * &log_mu1 / hp::int(8, prec));
        estimates.push(Estimate {
            mu: Some(fmt(&mu)),
            mu1: Some(fmt(&hp::exp(&log_mu1))),
            g: g.as_ref().map(fmt),
            value: Some(fmt(&p.value)),
            ..base("ratio_fit_three", p, *e)
        });
    }
    if let Some((p, e)) = find(&traces, "log_fit_three_mu1").and_then(|i| settled(&traces[i])) {
        let coeffs = cut_coefficients(s, opts.ratio_cutoff);
        let f = fit_log_three(&coeffs, &opts.sigma, &mu, p.n, prec)?;
        let d = f.derived;
        estimates.push(Estimate {
            mu: Some(fmt(&mu)),
            mu1: d.mu1.as_ref().map(fmt),
            g: d.g.as_ref().map(fmt),
            b: d.b.as_ref().map(fmt),
            sigma: Some(fmt(&opts.sigma)),
            ..base("log_fit_three", &p, e)
        });
    }
    if let Some((p, e)) = find(&traces, "confluent_extrapolants").and_then(|i| settled(&traces[i])) {
        estimates.push(Estimate {
            value: Some(fmt(&p.value)),
            ..base("confluent", &p, e)
        });
    }
    let summary = Summary {
        exact_terms: s.exact_len(),
        predicted_terms: s.extended.len(),
        predicted_ratios: s.extended_ratios.len(),
        ratio_cutoff: opts.ratio_cutoff,
        mu: Some(fmt(&mu)),
        mu_source,
        sigma: fmt(&opts.sigma),
        stretched_exponential_signal: signal,
        estimates,
        notes,
    };
    Ok(Report { traces, summary })
}

impl Summary {
    pub fn estimate(&self, method: &str) -> Option<&Estimate> {
        self.estimates.iter().find(|e| e.method == method)
    }
}
