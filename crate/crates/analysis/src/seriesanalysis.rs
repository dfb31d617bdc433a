//! Ratio methods and windowed fits for coefficients of the form
//! `B μ^n μ₁^{n^σ} n^g`.

use crate::hp::{self, Real};
use crate::linalg::{solve_real, SingularSystem};
use crate::series::{Point, Series};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error("equal abscissae at index {index}")]
    DegenerateAbscissa { index: usize },
    #[error("r_n equals mu at n = {n}")]
    ZeroDeviation { n: usize },
    #[error("singular fit system for window starting at {start}")]
    SingularSystem { start: usize },
    #[error("need {needed} coefficients, have {available}")]
    InsufficientLength { needed: usize, available: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Quantities implied by a fit; absent entries are not determined by it.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Derived {
    pub mu: Option<Real>,
    pub mu1: Option<Real>,
    pub g: Option<Real>,
    pub b: Option<Real>,
    pub sigma: Option<Real>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// Coefficient indices entering the system.
    pub window: Vec<usize>,
    /// Fitted values in the order the model lists them.
    pub c: Vec<Real>,
    pub derived: Derived,
    /// True if any coefficient in the window is predicted.
    pub predicted: bool,
}

fn lookup(points: &[Point], n: usize) -> Option<&Point> {
    let first = points.first()?.n;
    points.get(n.checked_sub(first)?).filter(|p| p.n == n)
}

/// `r_n` for `n = 2..`, through the extension when present.
pub fn ratios(s: &Series) -> Vec<Point> {
    s.ratio_points(None)
}

/// Intercepts at `x = 0` of the lines through adjacent points.
pub fn linear_extrapolants(xs: &[Real], ys: &[Real]) -> Result<Vec<Real>, AnalysisError> {
    assert_eq!(xs.len(), ys.len());
    let mut out = Vec::with_capacity(xs.len().saturating_sub(1));
    for i in 1..xs.len() {
        let dx = &xs[i] - &xs[i - 1];
        if hp::is_zero(&dx) {
            return Err(AnalysisError::DegenerateAbscissa { index: i });
        }
        out.push(&ys[i - 1] - &xs[i - 1] * (&ys[i] - &ys[i - 1]) / dx);
    }
    Ok(out)
}

/// Extrapolants of a trace against `n^{-power}`, labelled by the later index.
pub fn extrapolate_trace(trace: &[Point], power: &Real, prec: usize) -> Result<Vec<Point>, AnalysisError> {
    let xs: Vec<Real> = trace.iter().map(|p| abscissa(p.n, power, prec)).collect();
    let ys: Vec<Real> = trace.iter().map(|p| p.value.clone()).collect();
    let e = linear_extrapolants(&xs, &ys)?;
    Ok(e.into_iter()
        .zip(trace.windows(2))
        .map(|(value, w)| Point {
            n: w[1].n,
            value,
            predicted: w[0].predicted || w[1].predicted,
        })
        .collect())
}

/// `n^{-power}`.
pub fn abscissa(n: usize, power: &Real, prec: usize) -> Real {
    let one = hp::int(1, prec);
    one / hp::powf(&hp::int(n as i64, prec), power)
}

/// `l_n = n r_n - (n-1) r_{n-1}` for `n = 3..`.
pub fn modified_ratios(s: &Series) -> Vec<Point> {
    modified_from_ratios(&ratios(s), s.precision)
}

pub fn modified_from_ratios(r: &[Point], prec: usize) -> Vec<Point> {
    r.windows(2)
        .map(|w| {
            let n = w[1].n;
            Point {
                n,
                value: hp::int(n as i64, prec) * &w[1].value - hp::int(n as i64 - 1, prec) * &w[0].value,
                predicted: w[0].predicted || w[1].predicted,
            }
        })
        .collect()
}

/// Estimates of `1 - σ` from adjacent points of `log|1 - r_n/μ|` against
/// `log n`, labelled by the later index. Ratios above `μ` (a power law with
/// `g > 0`) give the same slope as ratios below it.
pub fn sigma_gradient(r: &[Point], mu: &Real, prec: usize) -> Result<Vec<Point>, AnalysisError> {
    let one = hp::int(1, prec);
    let mut logs = Vec::with_capacity(r.len());
    for p in r {
        let dev = hp::abs(&(&one - &p.value / mu));
        if hp::is_zero(&dev) {
            return Err(AnalysisError::ZeroDeviation { n: p.n });
        }
        logs.push((hp::ln(&dev), hp::ln(&hp::int(p.n as i64, prec))));
    }
    Ok(r.windows(2)
        .zip(logs.windows(2))
        .map(|(w, l)| Point {
            n: w[1].n,
            value: -((&l[1].0 - &l[0].0) / (&l[1].1 - &l[0].1)),
            predicted: w[0].predicted || w[1].predicted,
        })
        .collect())
}

/// Extra digits carried through fit systems, which lose a few digits to
/// conditioning.
pub const GUARD_DIGITS: usize = 20;

fn solve(a: Vec<Vec<Real>>, b: Vec<Real>, start: usize) -> Result<Vec<Real>, AnalysisError> {
    solve_real(a, b).map_err(|SingularSystem| AnalysisError::SingularSystem { start })
}

fn rounded(x: Real, prec: usize) -> Real {
    hp::set_precision(&x, prec)
}

fn round_fit(mut f: FitResult, prec: usize) -> FitResult {
    f.c = f.c.into_iter().map(|x| rounded(x, prec)).collect();
    let d = &mut f.derived;
    for v in [&mut d.mu, &mut d.mu1, &mut d.g, &mut d.b, &mut d.sigma] {
        *v = v.take().map(|x| rounded(x, prec));
    }
    f
}

/// Solves `r_j/μ = 1 + c₁/√j + c₂/j + c₃/j^{3/2}` at `j = k-1, k, k+1`;
/// `log μ₁ = 2c₁` and `g = c₂ - log²μ₁/8`.
pub fn fit_ratio_three(r: &[Point], mu: &Real, k: usize, prec: usize) -> Result<FitResult, AnalysisError> {
    if k < 3 {
        return Err(AnalysisError::InvalidParameter(format!("window centre {k} < 3")));
    }
    let out = prec;
    let prec = prec + GUARD_DIGITS;
    let mu = &hp::set_precision(mu, prec);
    let one = hp::int(1, prec);
    let mut a = Vec::with_capacity(3);
    let mut b = Vec::with_capacity(3);
    let mut predicted = false;
    for j in k - 1..=k + 1 {
        let p = lookup(r, j).ok_or(AnalysisError::InsufficientLength {
            needed: k + 1,
            available: r.last().map_or(0, |p| p.n),
        })?;
        predicted |= p.predicted;
        let sj = hp::sqrt(&hp::int(j as i64, prec));
        let jf = hp::int(j as i64, prec);
        a.push(vec![&one / &sj, &one / &jf, &one / (&jf * &sj)]);
        b.push(hp::set_precision(&p.value, prec) / mu - &one);
    }
    let c = solve(a, b, k - 1)?;
    let log_mu1 = hp::int(2, prec) * &c[0];
    let g = &c[1] - &log_mu1 * &log_mu1 / hp::int(8, prec);
    Ok(round_fit(
        FitResult {
            window: vec![k - 1, k, k + 1],
            derived: Derived {
                mu: Some(mu.clone()),
                mu1: Some(hp::exp(&log_mu1)),
                g: Some(g),
                ..Derived::default()
            },
            c,
            predicted,
        },
        out,
    ))
}

fn log_coefficients(coeffs: &[Point], idx: &[usize], prec: usize) -> Result<(Vec<Real>, bool), AnalysisError> {
    let mut out = Vec::with_capacity(idx.len());
    let mut predicted = false;
    for &n in idx {
        let p = lookup(coeffs, n).ok_or(AnalysisError::InsufficientLength {
            needed: n,
            available: coeffs.last().map_or(0, |p| p.n),
        })?;
        if !hp::is_positive(&p.value) {
            return Err(AnalysisError::InvalidParameter(format!("b_{n} is not positive")));
        }
        predicted |= p.predicted;
        out.push(hp::ln(&hp::set_precision(&p.value, prec)));
    }
    Ok((out, predicted))
}

fn check_sigma(sigma: &Real, prec: usize) -> Result<(), AnalysisError> {
    if !hp::is_positive(sigma) || !hp::is_positive(&(hp::int(1, prec) - sigma)) {
        return Err(AnalysisError::InvalidParameter("sigma must lie in (0, 1)".into()));
    }
    Ok(())
}

/// Solves `log b_k = c₁k + c₂k^σ + c₃ log k + c₄` at `k = n-2..=n+1`;
/// `μ = e^{c₁}`, `μ₁ = e^{c₂}`, `g = c₃`, `B = e^{c₄}`.
pub fn fit_log_four(coeffs: &[Point], sigma: &Real, n: usize, prec: usize) -> Result<FitResult, AnalysisError> {
    check_sigma(sigma, prec)?;
    if n < 3 {
        return Err(AnalysisError::InvalidParameter(format!("window index {n} < 3")));
    }
    let out = prec;
    let prec = prec + GUARD_DIGITS;
    let sigma = &hp::set_precision(sigma, prec);
    let window: Vec<usize> = (n - 2..=n + 1).collect();
    let (b, predicted) = log_coefficients(coeffs, &window, prec)?;
    let a = window
        .iter()
        .map(|&k| {
            let kf = hp::int(k as i64, prec);
            vec![kf.clone(), hp::powf(&kf, sigma), hp::ln(&kf), hp::int(1, prec)]
        })
        .collect();
    let c = solve(a, b, n - 2)?;
    Ok(round_fit(
        FitResult {
            window,
            derived: Derived {
                mu: Some(hp::exp(&c[0])),
                mu1: Some(hp::exp(&c[1])),
                g: Some(c[2].clone()),
                b: Some(hp::exp(&c[3])),
                sigma: Some(sigma.clone()),
            },
            c,
            predicted,
        },
        out,
    ))
}

/// Solves `log b_k - k log μ = c₂k^σ + c₃ log k + c₄` at `k = n-1, n, n+1`.
/// The returned `c` holds `(c₂, c₃, c₄)`.
pub fn fit_log_three(
    coeffs: &[Point],
    sigma: &Real,
    mu: &Real,
    n: usize,
    prec: usize,
) -> Result<FitResult, AnalysisError> {
    check_sigma(sigma, prec)?;
    if n < 2 {
        return Err(AnalysisError::InvalidParameter(format!("window index {n} < 2")));
    }
    let out = prec;
    let prec = prec + GUARD_DIGITS;
    let (sigma, mu) = (&hp::set_precision(sigma, prec), &hp::set_precision(mu, prec));
    let window: Vec<usize> = (n - 1..=n + 1).collect();
    let (logs, predicted) = log_coefficients(coeffs, &window, prec)?;
    let log_mu = hp::ln(mu);
    let mut a = Vec::with_capacity(3);
    let mut b = Vec::with_capacity(3);
    for (&k, lb) in window.iter().zip(logs) {
        let kf = hp::int(k as i64, prec);
        b.push(lb - &kf * &log_mu);
        a.push(vec![hp::powf(&kf, sigma), hp::ln(&kf), hp::int(1, prec)]);
    }
    let c = solve(a, b, n - 1)?;
    Ok(round_fit(
        FitResult {
            window,
            derived: Derived {
                mu: Some(mu.clone()),
                mu1: Some(hp::exp(&c[0])),
                g: Some(c[1].clone()),
                b: Some(hp::exp(&c[2])),
                sigma: Some(sigma.clone()),
            },
            c,
            predicted,
        },
        out,
    ))
}

/// `r̃_n = e_n / e_{n-1}` with `e_n = d_{n²}` and `d_m = b_m / μ^m`, for
/// every `n ≥ 2` with `n² ≤` available length.
pub fn confluent_log_test(coeffs: &[Point], mu: &Real, prec: usize) -> Result<Vec<Point>, AnalysisError> {
    let available = coeffs.last().map_or(0, |p| p.n);
    if available < 4 {
        return Err(AnalysisError::InsufficientLength { needed: 4, available });
    }
    let log_mu = hp::ln(mu);
    let log_d = |m: usize| -> Result<(Real, bool), AnalysisError> {
        let (l, pr) = log_coefficients(coeffs, &[m], prec)?;
        Ok((&l[0] - hp::int(m as i64, prec) * &log_mu, pr))
    };
    let mut out = Vec::new();
    let mut n = 2;
    while n * n <= available {
        let (hi, p1) = log_d(n * n)?;
        let (lo, p0) = log_d((n - 1) * (n - 1))?;
        out.push(Point {
            n,
            value: hp::exp(&(hi - lo)),
            predicted: p0 || p1,
        });
        n += 1;
    }
    Ok(out)
}

/// `d_n = exp(2 n^{3/2} (b̃_n - b̃_{n-1}))` with `b̃_n = log b_n / √n`, for
/// `n = 2..`.
pub fn renormalize(coeffs: &[Point], prec: usize) -> Result<Vec<Point>, AnalysisError> {
    let mut tilde = Vec::with_capacity(coeffs.len());
    for p in coeffs {
        if !hp::is_positive(&p.value) {
            return Err(AnalysisError::InvalidParameter(format!("b_{} is not positive", p.n)));
        }
        let nf = hp::int(p.n as i64, prec);
        tilde.push(hp::ln(&p.value) / hp::sqrt(&nf));
    }
    Ok(coeffs
        .windows(2)
        .zip(tilde.windows(2))
        .map(|(w, t)| {
            let n = w[1].n;
            let nf = hp::int(n as i64, prec);
            let c = hp::int(2, prec) * &nf * hp::sqrt(&nf) * (&t[1] - &t[0]);
            Point {
                n,
                value: hp::exp(&c),
                predicted: w[0].predicted || w[1].predicted,
            }
        })
        .collect())
}
