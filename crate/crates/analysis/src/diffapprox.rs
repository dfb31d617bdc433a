//! Differential approximants `Σ_k Q_k(z) y^{(k)}(z) = P(z)` fitted exactly
//! to a series prefix, their singularities, and series extension.
//!
//! Series are held as integers `b_n` with `a_n = b_n · 10^{s n - D}`, i.e.
//! as a series in `w = 10^s z` scaled by `10^D`. The ODE is fitted in `w`;
//! locations are mapped back to `z` and exponents are scale invariant.

use dashu_int::IBig;
use rayon::prelude::*;

use crate::hp::{self, Real};
use crate::linalg::{bareiss_null_vector, SingularSystem};
use crate::poly::{self, IPoly};
use crate::series::{Predicted, Series};

/// Extra digits carried by recurrences and root polishing.
const GUARD: usize = 20;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DaError {
    #[error("singular approximant system")]
    SingularSystem,
    #[error("recurrence leading coefficient vanishes at index {index}")]
    RecurrenceLeadingZero { index: usize },
    #[error("only {got} approximants succeeded, need {needed}")]
    TooFewApproximants { got: usize, needed: usize },
    #[error("configuration needs {needed} coefficients, {available} available")]
    InsufficientCoefficients { needed: usize, available: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl From<SingularSystem> for DaError {
    fn from(_: SingularSystem) -> Self {
        DaError::SingularSystem
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DaInput {
    pub coeffs: Vec<IBig>,
    /// `s`: the fit variable is `w = 10^s z`.
    pub scale_exp: i64,
    /// `D`: coefficients carry a factor `10^D`.
    pub digits: i64,
}

impl DaInput {
    pub fn from_integers(values: &[IBig]) -> Self {
        DaInput {
            coeffs: values.to_vec(),
            scale_exp: 0,
            digits: 0,
        }
    }

    /// Rounds `a_n 10^{D - s n}` with `s` the nearest integer to the average
    /// decimal growth per term, so scaled coefficients have similar size.
    pub fn from_reals(values: &[Real], digits: usize) -> Self {
        let m = values.len();
        let s = if m >= 2 {
            let lo = hp::to_f64(&hp::ln(&hp::abs(&values[0])));
            let hi = hp::to_f64(&hp::ln(&hp::abs(&values[m - 1])));
            ((hi - lo) / std::f64::consts::LN_10 / (m - 1) as f64).round() as i64
        } else {
            0
        };
        let coeffs = values
            .iter()
            .enumerate()
            .map(|(n, v)| {
                let e = digits as i64 - s * n as i64;
                hp::round(&(v * Real::from_parts(IBig::ONE, e as isize)))
            })
            .collect();
        DaInput {
            coeffs,
            scale_exp: s,
            digits: digits as i64,
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `a_n` from a scaled coefficient `b_n`.
    pub fn unscale(&self, n: usize, b: &Real) -> Real {
        let e = self.scale_exp * n as i64 - self.digits;
        b * Real::from_parts(IBig::ONE, e as isize)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DaConfig {
    /// Degrees of `Q_0..Q_K`.
    pub degrees: Vec<usize>,
    /// Degree of `P`; `-1` for a homogeneous equation.
    pub l: i64,
}

impl DaConfig {
    pub fn new(degrees: Vec<usize>, l: i64) -> Result<Self, DaError> {
        if degrees.len() < 2 {
            return Err(DaError::InvalidConfig("order must be at least 1".into()));
        }
        if l < -1 {
            return Err(DaError::InvalidConfig("inhomogeneous degree below -1".into()));
        }
        Ok(DaConfig { degrees, l })
    }

    pub fn order(&self) -> usize {
        self.degrees.len() - 1
    }

    /// Polynomial coefficients including the pinned one.
    pub fn unknowns(&self) -> usize {
        self.degrees.iter().map(|d| d + 1).sum::<usize>() + (self.l + 1) as usize
    }

    /// Series coefficients `a_0..` entering the fitted equations.
    pub fn coefficients_used(&self) -> usize {
        self.unknowns() + self.order() - 1
    }
}

impl std::fmt::Display for DaConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let d: Vec<String> = self.degrees.iter().map(|d| d.to_string()).collect();
        write!(f, "K={} N=[{}] L={}", self.order(), d.join(","), self.l)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferentialApproximant {
    pub config: DaConfig,
    /// `q[k][i]`: coefficient of `w^i` in `Q_k`.
    pub q: Vec<Vec<IBig>>,
    pub p: Vec<IBig>,
    /// Index `i` of the coefficient of `Q_K` fixed before solving.
    pub pin: usize,
    pub scale_exp: i64,
}

/// `m! / (m-k)!`.
fn falling(m: usize, k: usize) -> IBig {
    (m + 1 - k..=m).fold(IBig::ONE, |acc, x| acc * IBig::from(x))
}

/// Coefficient of `w^j` in `Q_k y^{(k)}` contributed by `q_{k,i}`, divided
/// by `q_{k,i}`.
fn term(b: &[IBig], j: usize, k: usize, i: usize) -> IBig {
    if j < i {
        return IBig::ZERO;
    }
    let m = j - i + k;
    &b[m] * falling(m, k)
}

fn columns(cfg: &DaConfig) -> Vec<(usize, usize)> {
    cfg.degrees
        .iter()
        .enumerate()
        .flat_map(|(k, &d)| (0..=d).map(move |i| (k, i)))
        .collect()
}

/// Fits with the pinning rule: constant term of `Q_K` when that system is
/// regular, else the next coefficient of `Q_K`.
pub fn fit(input: &DaInput, cfg: &DaConfig) -> Result<DifferentialApproximant, DaError> {
    let mut last = DaError::SingularSystem;
    for pin in 0..=cfg.degrees[cfg.order()] {
        match fit_with_pin(input, cfg, pin) {
            Ok(da) => return Ok(da),
            Err(e @ DaError::SingularSystem) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

/// Fits with `q_{K,pin} = 1` (up to the common integer scale).
pub fn fit_with_pin(input: &DaInput, cfg: &DaConfig, pin: usize) -> Result<DifferentialApproximant, DaError> {
    let used = cfg.coefficients_used();
    if used > input.len() {
        return Err(DaError::InsufficientCoefficients {
            needed: used,
            available: input.len(),
        });
    }
    let big_k = cfg.order();
    if pin > cfg.degrees[big_k] {
        return Err(DaError::InvalidConfig(format!("pin {pin} exceeds deg Q_K")));
    }
    let cols = columns(cfg);
    let pin_col = cols.iter().position(|&c| c == (big_k, pin)).unwrap();
    let rows = cfg.unknowns() - 1;
    let np = (cfg.l + 1) as usize;
    let a: Vec<Vec<IBig>> = (0..rows)
        .map(|j| {
            let mut row: Vec<IBig> = cols.iter().map(|&(k, i)| term(&input.coeffs, j, k, i)).collect();
            row.extend((0..np).map(|l| if l == j { IBig::from(-1) } else { IBig::ZERO }));
            row
        })
        .collect();
    // lowest degrees first so that surplus freedom drops high-degree terms
    let mut order: Vec<usize> = (0..cols.len() + np).filter(|&c| c != pin_col).collect();
    order.sort_by_key(|&c| match cols.get(c) {
        Some(&(k, i)) => (i, k),
        None => (c - cols.len(), big_k + 1),
    });
    order.push(pin_col);
    let full = bareiss_null_vector(&a, &order)?;
    let g = IBig::from(poly::content(&full));
    let sign = if full[pin_col] < IBig::ZERO {
        -IBig::ONE
    } else {
        IBig::ONE
    };
    let g = g * sign;
    let full: Vec<IBig> = full.iter().map(|v| v / &g).collect();
    let mut q: Vec<Vec<IBig>> = cfg.degrees.iter().map(|&d| Vec::with_capacity(d + 1)).collect();
    for (&(k, _), v) in cols.iter().zip(&full) {
        q[k].push(v.clone());
    }
    if q[big_k].iter().all(|c| *c == IBig::ZERO) {
        return Err(DaError::SingularSystem);
    }
    Ok(DifferentialApproximant {
        config: cfg.clone(),
        p: full[cols.len()..].to_vec(),
        q,
        pin,
        scale_exp: input.scale_exp,
    })
}

impl DifferentialApproximant {
    /// Coefficient of `w^j` in `Σ Q_k y^{(k)} - P` for the input series.
    pub fn residual_at(&self, b: &[IBig], j: usize) -> IBig {
        let mut s = IBig::ZERO;
        for (k, qk) in self.q.iter().enumerate() {
            for (i, c) in qk.iter().enumerate() {
                if *c != IBig::ZERO {
                    s += c * term(b, j, k, i);
                }
            }
        }
        if let Some(pj) = self.p.get(j) {
            s -= pj;
        }
        s
    }

    /// Largest `k - i` over nonzero `q_{k,i}`: the recurrence at `w^j`
    /// determines `b_{j+δ}`.
    pub fn shift(&self) -> usize {
        let mut best = 0;
        for (k, qk) in self.q.iter().enumerate() {
            for (i, c) in qk.iter().enumerate() {
                if *c != IBig::ZERO && k >= i {
                    best = best.max(k - i);
                }
            }
        }
        best
    }

    pub fn leading(&self) -> &IPoly {
        &self.q[self.config.order()]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Singularity {
    pub re: Real,
    pub im: Real,
    pub multiplicity: usize,
    /// `λ` in `(1 - z/z_c)^λ`; only for simple real roots.
    pub exponent: Option<Real>,
    pub certified: bool,
}

impl Singularity {
    pub fn is_real(&self) -> bool {
        hp::is_zero(&self.im)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularityReport {
    /// Sorted by modulus.
    pub singularities: Vec<Singularity>,
    /// Index of the smallest positive real root.
    pub physical: Option<usize>,
}

impl SingularityReport {
    pub fn physical(&self) -> Option<&Singularity> {
        self.physical.map(|i| &self.singularities[i])
    }

    pub fn positive_real(&self) -> impl Iterator<Item = &Singularity> {
        self.singularities
            .iter()
            .filter(|s| s.is_real() && hp::is_positive(&s.re))
    }

    /// Whether some other root lies within relative distance `radius` of `s`.
    pub fn has_neighbour(&self, s: &Singularity, radius: f64) -> bool {
        let (x, y) = (hp::to_f64(&s.re), hp::to_f64(&s.im));
        let r = radius * x.hypot(y);
        self.singularities
            .iter()
            .filter(|t| !std::ptr::eq(*t, s))
            .any(|t| (hp::to_f64(&t.re) - x).hypot(hp::to_f64(&t.im) - y) <= r)
    }

    /// The positive real root nearest `target`, if within relative distance
    /// `tol`.
    pub fn nearest_positive(&self, target: f64, tol: f64) -> Option<&Singularity> {
        self.positive_real()
            .map(|s| (s, (hp::to_f64(&s.re) - target).abs()))
            .filter(|&(_, d)| d <= tol * target)
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(s, _)| s)
    }
}

/// Relative width used to find the consensus location of a table.
pub const CONSENSUS_WIDTH: f64 = 1e-3;
/// Relative distance beyond which a member has no root at the consensus
/// location and counts as defective.
pub const CONSENSUS_ACCEPT: f64 = 0.05;
/// A member whose physical root has another root of `Q_K` within this
/// relative distance has a split singularity and counts as defective.
pub const SPLIT_RADIUS: f64 = 0.02;

/// The location shared by the most reports: each positive real root is
/// scored by how many reports have a root within `CONSENSUS_WIDTH` of it,
/// and the median of those neighbours of the best root is returned.
pub fn consensus_location(reports: &[SingularityReport]) -> Option<f64> {
    let roots: Vec<Vec<f64>> = reports
        .iter()
        .map(|r| r.positive_real().map(|s| hp::to_f64(&s.re)).collect())
        .collect();
    let near = |x: f64| -> Vec<f64> {
        roots
            .iter()
            .filter_map(|rs| {
                rs.iter()
                    .copied()
                    .filter(|y| (y - x).abs() <= CONSENSUS_WIDTH * x)
                    .min_by(|a, b| (a - x).abs().total_cmp(&(b - x).abs()))
            })
            .collect()
    };
    let mut best: Option<(usize, f64)> = None;
    for &x in roots.iter().flatten() {
        let score = near(x).len();
        if best.is_none_or(|(s, b)| score > s || (score == s && x < b)) {
            best = Some((score, x));
        }
    }
    let mut cluster = near(best?.1);
    cluster.sort_by(f64::total_cmp);
    Some(cluster[cluster.len() / 2])
}

/// Roots of `Q_K`, with the exponent `K - 1 - Q_{K-1}(z_c)/Q_K'(z_c)` at
/// each simple real root.
pub fn singularities(da: &DifferentialApproximant, prec: usize) -> SingularityReport {
    let wp = prec + GUARD;
    let big_k = da.config.order();
    let lead: Vec<Real> = da.leading().iter().map(|c| hp::from_ibig(c, wp)).collect();
    let next: Vec<Real> = da.q[big_k - 1].iter().map(|c| hp::from_ibig(c, wp)).collect();
    let unscale = Real::from_parts(IBig::ONE, -da.scale_exp as isize);
    let mut out = Vec::new();
    for r in poly::roots(da.leading(), wp) {
        let exponent = if r.is_real() && r.multiplicity == 1 {
            let (_, dq) = poly::eval_real(&lead, &r.re);
            let (qn, _) = poly::eval_real(&next, &r.re);
            (!hp::is_zero(&dq)).then(|| hp::set_precision(&(hp::int(big_k as i64 - 1, wp) - qn / dq), prec))
        } else {
            None
        };
        out.push(Singularity {
            re: hp::set_precision(&(&r.re * &unscale), prec),
            im: hp::set_precision(&(&r.im * &unscale), prec),
            multiplicity: r.multiplicity,
            exponent,
            certified: r.certified,
        });
    }
    let physical = out.iter().position(|s| s.is_real() && hp::is_positive(&s.re));
    SingularityReport {
        singularities: out,
        physical,
    }
}

/// Runs the coefficient recurrence past the whole input, returning
/// `a_M..a_{M+count-1}` with `M = input.len()`.
pub fn predict_coefficients(
    da: &DifferentialApproximant,
    input: &DaInput,
    count: usize,
    prec: usize,
) -> Result<Vec<Real>, DaError> {
    let wp = prec + GUARD;
    let delta = da.shift();
    let qr: Vec<Vec<Real>> =
        da.q.iter()
            .map(|qk| qk.iter().map(|c| hp::from_ibig(c, wp)).collect())
            .collect();
    let mut b: Vec<Real> = input.coeffs.iter().map(|c| hp::from_ibig(c, wp)).collect();
    let start = b.len();
    let mut out = Vec::with_capacity(count);
    for m in start..start + count {
        let j = m - delta;
        let mut lead = IBig::ZERO;
        let mut rest = hp::int(0, wp);
        for (k, qk) in da.q.iter().enumerate() {
            for (i, c) in qk.iter().enumerate() {
                if *c == IBig::ZERO || j < i {
                    continue;
                }
                let idx = j - i + k;
                if idx == m {
                    lead += c * falling(m, k);
                } else {
                    let f = hp::from_ibig(&falling(idx, k), wp);
                    rest += &qr[k][i] * &b[idx] * f;
                }
            }
        }
        if lead == IBig::ZERO {
            return Err(DaError::RecurrenceLeadingZero { index: m });
        }
        let pj = da.p.get(j).map_or(hp::int(0, wp), |v| hp::from_ibig(v, wp));
        let bm = (pj - rest) / hp::from_ibig(&lead, wp);
        out.push(hp::set_precision(&input.unscale(m, &bm), prec));
        b.push(bm);
    }
    Ok(out)
}

/// Degree vectors of order `K` with all degrees `N`, or one of them `N + 1`,
/// using between `min_fraction` and all of `available` coefficients.
pub fn candidate_configs(order: usize, l: i64, available: usize, min_fraction: f64) -> Vec<DaConfig> {
    let lo = (min_fraction * available as f64).ceil() as usize;
    let mut out = Vec::new();
    for n in 0.. {
        let base = DaConfig {
            degrees: vec![n; order + 1],
            l,
        };
        if base.coefficients_used() > available {
            break;
        }
        let mut variants = vec![base.clone()];
        for k in 0..=order {
            let mut c = base.clone();
            c.degrees[k] += 1;
            variants.push(c);
        }
        for c in variants {
            let used = c.coefficients_used();
            if used >= lo && used <= available {
                out.push(c);
            }
        }
    }
    out
}

/// Smallest fraction of the available coefficients an ensemble member uses.
pub const DEFAULT_MIN_FRACTION: f64 = 0.9;

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleOptions {
    pub orders: Vec<usize>,
    pub l_values: Vec<i64>,
    pub min_fraction: f64,
    pub min_members: usize,
    pub precision: usize,
}

impl Default for EnsembleOptions {
    fn default() -> Self {
        EnsembleOptions {
            orders: vec![2, 3],
            l_values: (0..=10).collect(),
            min_fraction: DEFAULT_MIN_FRACTION,
            min_members: 3,
            precision: hp::DEFAULT_PRECISION,
        }
    }
}

impl EnsembleOptions {
    pub fn configs(&self, available: usize) -> Vec<DaConfig> {
        let mut out = Vec::new();
        for &k in &self.orders {
            for &l in &self.l_values {
                out.extend(candidate_configs(k, l, available, self.min_fraction));
            }
        }
        out
    }
}

/// Fits every configuration; results keep the configuration order.
pub fn fit_all(input: &DaInput, configs: &[DaConfig]) -> Vec<Result<DifferentialApproximant, DaError>> {
    configs.par_iter().map(|c| fit(input, c)).collect()
}

/// Mean and sample standard deviation.
pub fn mean_std(values: &[Real], prec: usize) -> (Real, Real) {
    let n = values.len();
    let zero = hp::int(0, prec);
    if n == 0 {
        return (zero.clone(), zero);
    }
    let mean = values.iter().fold(zero.clone(), |a, v| a + v) / hp::int(n as i64, prec);
    if n == 1 {
        return (mean, zero);
    }
    let ss = values.iter().fold(zero, |a, v| {
        let d = v - &mean;
        a + &d * &d
    });
    (mean, hp::sqrt(&(ss / hp::int(n as i64 - 1, prec))))
}

/// Members further than this many scaled MADs from the median are dropped
/// from a predicted value.
pub const OUTLIER_MADS: f64 = 5.0;

/// Mean and `1.5` standard deviations of the values within `OUTLIER_MADS`
/// scaled MADs of the median.
pub fn robust_summary(values: &[Real], prec: usize) -> Predicted {
    let mut sorted = values.to_vec();
    sorted.sort();
    let median = sorted[sorted.len() / 2].clone();
    let mut dev: Vec<Real> = values.iter().map(|v| hp::abs(&(v - &median))).collect();
    dev.sort();
    let limit = hp::parse(&format!("{}", 1.4826 * OUTLIER_MADS), prec).unwrap() * &dev[dev.len() / 2];
    let kept: Vec<Real> = values
        .iter()
        .filter(|v| hp::abs(&(*v - &median)) <= limit)
        .cloned()
        .collect();
    let (mean, std) = mean_std(&kept, prec);
    Predicted {
        value: mean,
        errbar: hp::ratio(3, 2, prec) * std,
    }
}

/// Extends `s` by `count` coefficients and `ratio_count` ratios from the
/// predictions of every fitted member, summarised by `robust_summary`. The
/// fitted series is `1, p_1, p_2, ...`.
pub fn ensemble_extend(
    s: &Series,
    opts: &EnsembleOptions,
    count: usize,
    ratio_count: usize,
) -> Result<Series, DaError> {
    let prec = opts.precision;
    let mut values = vec![IBig::ONE];
    values.extend(s.exact.iter().map(|v| IBig::from(v.clone())));
    let input = DaInput::from_integers(&values);
    let configs = opts.configs(input.len());
    let horizon = count.max(ratio_count);
    let last_exact = hp::from_ibig(values.last().unwrap(), prec);
    let predictions: Vec<Vec<Real>> = configs
        .par_iter()
        .filter_map(|c| {
            let da = fit(&input, c).ok()?;
            let pred = predict_coefficients(&da, &input, horizon, prec).ok()?;
            pred.iter().all(hp::is_positive).then_some(pred)
        })
        .collect();
    if predictions.len() < opts.min_members {
        return Err(DaError::TooFewApproximants {
            got: predictions.len(),
            needed: opts.min_members,
        });
    }
    let mut out = s.clone();
    out.extended.clear();
    out.extended_ratios.clear();
    for i in 0..count {
        let col: Vec<Real> = predictions.iter().map(|p| p[i].clone()).collect();
        out.extended.push(robust_summary(&col, prec));
    }
    for i in 0..ratio_count {
        let col: Vec<Real> = predictions
            .iter()
            .map(|p| {
                let prev = if i == 0 { &last_exact } else { &p[i - 1] };
                &p[i] / prev
            })
            .collect();
        out.extended_ratios.push(robust_summary(&col, prec));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub config: DaConfig,
    pub location: Real,
    pub exponent: Option<Real>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DaRow {
    pub l: i64,
    pub order: usize,
    pub members: Vec<Member>,
    /// Configurations that were singular or defective.
    pub skipped: usize,
    pub mean_location: Option<Real>,
    pub mean_exponent: Option<Real>,
}

/// For each `(L, order)`, physical singularities of all candidate
/// approximants and their averages. The physical singularity of a member is
/// its positive real root nearest the consensus location of the whole table.
/// Members without one, or whose root there is split, are defective and
/// counted as skipped.
pub fn da_table(input: &DaInput, orders: &[usize], l_max: i64, min_fraction: f64, prec: usize) -> Vec<DaRow> {
    let mut keys = Vec::new();
    for l in 0..=l_max {
        for &k in orders {
            keys.push((l, k));
        }
    }
    let jobs: Vec<(usize, DaConfig)> = keys
        .iter()
        .enumerate()
        .flat_map(|(row, &(l, k))| {
            candidate_configs(k, l, input.len(), min_fraction)
                .into_iter()
                .map(move |c| (row, c))
        })
        .collect();
    let reports: Vec<(usize, &DaConfig, Option<SingularityReport>)> = jobs
        .par_iter()
        .map(|(row, c)| (*row, c, fit(input, c).ok().map(|da| singularities(&da, prec))))
        .collect();
    let fitted: Vec<SingularityReport> = reports.iter().filter_map(|r| r.2.clone()).collect();
    let centre = consensus_location(&fitted);
    let results: Vec<(usize, Option<Member>)> = reports
        .iter()
        .map(|(row, c, rep)| {
            let member = rep.as_ref().zip(centre).and_then(|(rep, x)| {
                let s = rep.nearest_positive(x, CONSENSUS_ACCEPT)?;
                (!rep.has_neighbour(s, SPLIT_RADIUS)).then(|| Member {
                    config: (*c).clone(),
                    location: s.re.clone(),
                    exponent: s.exponent.clone(),
                })
            });
            (*row, member)
        })
        .collect();
    keys.iter()
        .enumerate()
        .map(|(row, &(l, order))| {
            let mut members = Vec::new();
            let mut skipped = 0;
            for (r, m) in &results {
                if *r == row {
                    match m {
                        Some(m) => members.push(m.clone()),
                        None => skipped += 1,
                    }
                }
            }
            let locs: Vec<Real> = members.iter().map(|m| m.location.clone()).collect();
            let exps: Vec<Real> = members.iter().filter_map(|m| m.exponent.clone()).collect();
            DaRow {
                l,
                order,
                skipped,
                mean_location: (!locs.is_empty()).then(|| mean_std(&locs, prec).0),
                mean_exponent: (!exps.is_empty()).then(|| mean_std(&exps, prec).0),
                members,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PowerLawDiagnostic {
    pub members: usize,
    pub location_median: f64,
    pub location_spread: f64,
    pub exponent_median: f64,
    /// `1.4826 × MAD`, a standard deviation for normal scatter.
    pub exponent_spread: f64,
    pub exponent_min: f64,
    pub exponent_max: f64,
    pub power_law: bool,
}

/// Exponent spread above which estimates count as scattered.
pub const EXPONENT_SPREAD_LIMIT: f64 = 0.5;

fn median_spread(mut v: Vec<f64>) -> (f64, f64) {
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let median = |v: &mut Vec<f64>| {
        v.sort_by(f64::total_cmp);
        let n = v.len();
        if n % 2 == 1 {
            v[n / 2]
        } else {
            (v[n / 2 - 1] + v[n / 2]) / 2.0
        }
    };
    let m = median(&mut v);
    let mut dev: Vec<f64> = v.iter().map(|x| (x - m).abs()).collect();
    (m, 1.4826 * median(&mut dev))
}

/// Pools every member of a table. A clean power law gives a tight exponent
/// cluster; scattered exponents flag a non-power-law singularity.
pub fn power_law_diagnostic(rows: &[DaRow]) -> PowerLawDiagnostic {
    let locs: Vec<f64> = rows
        .iter()
        .flat_map(|r| r.members.iter().map(|m| hp::to_f64(&m.location)))
        .collect();
    let exps: Vec<f64> = rows
        .iter()
        .flat_map(|r| r.members.iter().filter_map(|m| m.exponent.as_ref().map(hp::to_f64)))
        .collect();
    let (lm, ls) = median_spread(locs.clone());
    let (em, es) = median_spread(exps.clone());
    PowerLawDiagnostic {
        members: locs.len(),
        location_median: lm,
        location_spread: ls,
        exponent_median: em,
        exponent_spread: es,
        exponent_min: exps.iter().cloned().fold(f64::INFINITY, f64::min),
        exponent_max: exps.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        power_law: !exps.is_empty() && es <= EXPONENT_SPREAD_LIMIT,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hp::{agreeing_digits, int, ratio};

    const P: usize = 60;

    /// `binom(2n, n)`: coefficients of `(1 - 4z)^{-1/2}`.
    fn central_binomials(m: usize) -> Vec<IBig> {
        let mut out = vec![IBig::ONE];
        for n in 1..m {
            let prev = out[n - 1].clone();
            out.push(prev * IBig::from(2 * (2 * n - 1)) / IBig::from(n));
        }
        out
    }

    #[test]
    fn first_order_equation_of_central_binomials() {
        let input = DaInput::from_integers(&central_binomials(12));
        let cfg = DaConfig::new(vec![0, 1], -1).unwrap();
        let da = fit(&input, &cfg).unwrap();
        // (1 - 4z) y' = 2 y
        assert_eq!(da.q, vec![vec![IBig::from(-2)], vec![IBig::ONE, IBig::from(-4)]]);
        for j in 0..11 {
            assert_eq!(da.residual_at(&input.coeffs, j), IBig::ZERO);
        }
        let rep = singularities(&da, P);
        let s = rep.physical().unwrap();
        assert_eq!(s.re, ratio(1, 4, P));
        assert!(agreeing_digits(s.exponent.as_ref().unwrap(), &ratio(-1, 2, P)) > 50.0);
        let more = central_binomials(40);
        let pred = predict_coefficients(&da, &input, 28, P).unwrap();
        for (i, v) in pred.iter().enumerate() {
            assert_eq!(hp::round(v), more[12 + i]);
        }
    }

    #[test]
    fn exponential_is_recovered() {
        // n! a_n = 1 scaled by 20!
        let f20: IBig = (1..=20u64).fold(IBig::ONE, |a, x| a * IBig::from(x));
        let vals: Vec<IBig> = (0..=20u64)
            .map(|n| &f20 / (1..=n).fold(IBig::ONE, |a, x| a * IBig::from(x)))
            .collect();
        let input = DaInput::from_integers(&vals);
        let da = fit(&input, &DaConfig::new(vec![0, 0], -1).unwrap()).unwrap();
        assert_eq!(da.q, vec![vec![-IBig::ONE], vec![IBig::ONE]]);
        assert!(singularities(&da, P).singularities.is_empty());
    }

    #[test]
    fn larger_families_stay_exact_and_pinning_does_not_move_roots() {
        let input = DaInput::from_integers(&central_binomials(40));
        for cfg in candidate_configs(2, 1, 40, 0.8) {
            let da = fit(&input, &cfg).unwrap();
            for j in 0..cfg.unknowns() - 1 {
                assert_eq!(da.residual_at(&input.coeffs, j), IBig::ZERO, "{cfg}");
            }
            let phys = singularities(&da, P);
            let s = phys.physical().unwrap();
            assert!(agreeing_digits(&s.re, &ratio(1, 4, P)) > 30.0, "{cfg}");
            let pred = predict_coefficients(&da, &input, 5, P).unwrap();
            let more = central_binomials(45);
            for (i, v) in pred.iter().enumerate() {
                assert!(agreeing_digits(v, &hp::from_ibig(&more[40 + i], P)) > 40.0, "{cfg}");
            }
        }
        let cfg = DaConfig::new(vec![2, 2], 0).unwrap();
        let inp = DaInput::from_integers(&two_singularity_series(30));
        let a = singularities(&fit_with_pin(&inp, &cfg, 0).unwrap(), P);
        let b = singularities(&fit_with_pin(&inp, &cfg, 1).unwrap(), P);
        let pa = a.physical().unwrap();
        let pb = b.physical().unwrap();
        assert!(agreeing_digits(&pa.re, &pb.re) > 40.0);
    }

    /// `(1 - 3z)^{-2} + (1 - 5z)^{-1}`.
    fn two_singularity_series(m: usize) -> Vec<IBig> {
        (0..m)
            .map(|n| IBig::from(n + 1) * IBig::from(3).pow(n) + IBig::from(5).pow(n))
            .collect()
    }

    #[test]
    fn two_singularities_with_their_exponents() {
        let input = DaInput::from_integers(&two_singularity_series(30));
        let da = fit(&input, &DaConfig::new(vec![3, 3, 3], -1).unwrap()).unwrap();
        let rep = singularities(&da, P);
        let find = |x: Real| {
            rep.singularities
                .iter()
                .find(|s| s.is_real() && agreeing_digits(&s.re, &x) > 30.0)
                .cloned()
        };
        let a = find(ratio(1, 5, P)).expect("1/5");
        let b = find(ratio(1, 3, P)).expect("1/3");
        assert!(agreeing_digits(a.exponent.as_ref().unwrap(), &int(-1, P)) > 30.0);
        assert_eq!(rep.physical().unwrap().re, a.re);
        // the double pole shows up as exponent -2 or as a repeated root
        assert!(b.multiplicity > 1 || agreeing_digits(b.exponent.as_ref().unwrap(), &int(-2, P)) > 30.0);
    }

    #[test]
    fn real_inputs_are_scaled() {
        // a_n = 12^n binom(2n, n) / 7: singularity at 1/48
        let cb = central_binomials(30);
        let vals: Vec<Real> = cb
            .iter()
            .enumerate()
            .map(|(n, c)| hp::from_ibig(&(c * IBig::from(12).pow(n)), 80) / int(7, 80))
            .collect();
        let input = DaInput::from_reals(&vals, 70);
        assert_eq!(input.scale_exp, 2);
        let da = fit(&input, &DaConfig::new(vec![2, 2], -1).unwrap()).unwrap();
        let s = singularities(&da, P);
        let phys = s.physical().unwrap();
        assert!(agreeing_digits(&phys.re, &ratio(1, 48, P)) > 20.0);
        assert!(agreeing_digits(phys.exponent.as_ref().unwrap(), &ratio(-1, 2, P)) > 15.0);
        let pred = predict_coefficients(&da, &input, 3, P).unwrap();
        let want = hp::from_ibig(&(central_binomials(31)[30].clone() * IBig::from(12).pow(30)), P) / int(7, P);
        assert!(agreeing_digits(&pred[0], &want) > 25.0);
    }

    #[test]
    fn candidate_budget() {
        let c = candidate_configs(3, 0, 49, 0.8);
        assert!(!c.is_empty());
        for cfg in &c {
            assert!(cfg.coefficients_used() <= 49 && cfg.coefficients_used() >= 40);
            assert_eq!(cfg.order(), 3);
        }
        assert!(candidate_configs(3, 10, 10, 0.8).is_empty());
    }

    #[test]
    fn exact_ensemble_has_zero_error_bars() {
        let cb = central_binomials(31);
        let exact: Vec<dashu_int::UBig> = cb[1..].iter().map(|v| v.unsigned_abs()).collect();
        let s = Series::new(exact, P);
        let opts = EnsembleOptions {
            orders: vec![1, 2],
            l_values: vec![-1, 0, 1],
            ..EnsembleOptions::default()
        };
        let ext = ensemble_extend(&s, &opts, 5, 8).unwrap();
        let more = central_binomials(40);
        for (i, p) in ext.extended.iter().enumerate() {
            assert!(agreeing_digits(&p.value, &hp::from_ibig(&more[31 + i], P)) > 40.0);
            assert!(hp::to_f64(&p.errbar) < 1e-30 * hp::to_f64(&p.value));
        }
        assert_eq!(ext.extended_ratios.len(), 8);
        let short = Series::from_u64(&[1, 2], P);
        assert!(matches!(
            ensemble_extend(&short, &EnsembleOptions::default(), 1, 1),
            Err(DaError::TooFewApproximants { .. })
        ));
    }

    fn root(re: f64, im: f64) -> Singularity {
        Singularity {
            re: hp::parse(&re.to_string(), P).unwrap(),
            im: hp::parse(&im.to_string(), P).unwrap(),
            multiplicity: 1,
            exponent: None,
            certified: true,
        }
    }

    fn report(roots: &[(f64, f64)]) -> SingularityReport {
        SingularityReport {
            singularities: roots.iter().map(|&(re, im)| root(re, im)).collect(),
            physical: None,
        }
    }

    #[test]
    fn consensus_ignores_spurious_small_roots() {
        let reports = vec![
            report(&[(0.0862, 0.0), (0.5, 0.0)]),
            report(&[(0.03, 0.0), (0.08621, 0.0)]),
            report(&[(0.08619, 0.0), (-0.2, 0.0)]),
            report(&[(0.04, 0.0)]),
            report(&[]),
        ];
        assert_eq!(consensus_location(&reports), Some(0.0862));
        assert_eq!(consensus_location(&[report(&[(-1.0, 0.0)])]), None);
    }

    #[test]
    fn neighbours_and_nearest_roots() {
        let r = report(&[(0.0862, 0.0), (0.087, 0.001), (0.2, 0.0), (0.09, 0.0)]);
        let s = &r.singularities[0];
        assert!(r.has_neighbour(s, 0.02));
        assert!(!r.has_neighbour(s, 0.005));
        assert!(!r.has_neighbour(&r.singularities[2], 0.1));
        let near = r.nearest_positive(0.0865, 0.05).unwrap();
        assert_eq!(hp::to_f64(&near.re), 0.0862);
        assert!(r.nearest_positive(0.3, 0.05).is_none());
    }

    #[test]
    fn median_spread_is_robust() {
        let (m, s) = median_spread(vec![1.0, 2.0, 3.0, 4.0, 1000.0]);
        assert_eq!(m, 3.0);
        assert!((s - 1.4826).abs() < 1e-12);
        assert!(median_spread(Vec::new()).0.is_nan());
    }

    #[test]
    fn robust_summary_drops_diverging_members() {
        let values: Vec<Real> = ["10", "10.1", "9.9", "10.05", "9.95", "1e6"]
            .iter()
            .map(|v| hp::parse(v, P).unwrap())
            .collect();
        let p = robust_summary(&values, P);
        assert!((hp::to_f64(&p.value) - 10.0).abs() < 1e-12);
        assert!(hp::to_f64(&p.errbar) < 0.2);
        let same = robust_summary(&[int(7, P), int(7, P)], P);
        assert_eq!(hp::to_f64(&same.errbar), 0.0);
    }

    use dashu_base::UnsignedAbs;
}
