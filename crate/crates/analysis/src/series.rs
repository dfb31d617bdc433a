//! Exact coefficients plus optional predicted continuations.

use std::io::{self, BufRead, Write};

use dashu_int::UBig;

use crate::hp::{self, format_sci, Real};

/// Decimal digits written for predicted values and error bars.
pub const OUTPUT_DIGITS: usize = 30;

#[derive(Debug, Clone, PartialEq)]
pub struct Predicted {
    pub value: Real,
    pub errbar: Real,
}

/// One term of a derived sequence, tagged with its index and whether it
/// depends on predicted coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub n: usize,
    pub value: Real,
    pub predicted: bool,
}

/// `p_1..p_N` exactly, then predicted `p_{N+1}..` and predicted ratios
/// `r_{N+1}..` (the ratio extension may run further than the coefficients).
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub exact: Vec<UBig>,
    pub extended: Vec<Predicted>,
    pub extended_ratios: Vec<Predicted>,
    pub precision: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum SeriesFileError {
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("malformed series file at line {line}: {message}")]
    Malformed { line: usize, message: String },
}

impl Series {
    pub fn new(exact: Vec<UBig>, precision: usize) -> Self {
        Series {
            exact,
            extended: Vec::new(),
            extended_ratios: Vec::new(),
            precision,
        }
    }

    pub fn from_u64(values: &[u64], precision: usize) -> Self {
        Self::new(values.iter().map(|&v| UBig::from(v)).collect(), precision)
    }

    pub fn exact_len(&self) -> usize {
        self.exact.len()
    }

    /// Exact plus predicted coefficients.
    pub fn total_len(&self) -> usize {
        self.exact.len() + self.extended.len()
    }

    /// The same series with only the first `n` exact terms and no extension.
    pub fn truncated(&self, n: usize) -> Series {
        Series::new(self.exact[..n.min(self.exact.len())].to_vec(), self.precision)
    }

    /// The same series with predicted coefficients and ratios kept only up
    /// to the first whose error bar exceeds `rel_tol` times its value.
    pub fn reliable(&self, rel_tol: f64) -> Series {
        let keep = |v: &[Predicted]| -> Vec<Predicted> {
            v.iter()
                .take_while(|p| hp::to_f64(&p.errbar) <= rel_tol * hp::to_f64(&hp::abs(&p.value)))
                .cloned()
                .collect()
        };
        Series {
            exact: self.exact.clone(),
            extended: keep(&self.extended),
            extended_ratios: keep(&self.extended_ratios),
            precision: self.precision,
        }
    }

    pub fn coefficient(&self, n: usize) -> Option<Point> {
        if n == 0 {
            return None;
        }
        if n <= self.exact.len() {
            return Some(Point {
                n,
                value: hp::from_ubig(&self.exact[n - 1], self.precision),
                predicted: false,
            });
        }
        self.extended.get(n - self.exact.len() - 1).map(|p| Point {
            n,
            value: hp::set_precision(&p.value, self.precision),
            predicted: true,
        })
    }

    /// `p_1..p_m` with `m = min(total_len, limit)`.
    pub fn coefficients(&self, limit: Option<usize>) -> Vec<Point> {
        let m = limit.map_or(self.total_len(), |l| l.min(self.total_len()));
        (1..=m).filter_map(|n| self.coefficient(n)).collect()
    }

    /// `r_n = p_n / p_{n-1}` for `n = 2..=limit`: exact quotients first, then
    /// predicted ratios (or quotients of predicted coefficients when no ratio
    /// extension is attached).
    pub fn ratio_points(&self, limit: Option<usize>) -> Vec<Point> {
        let mut out = Vec::new();
        for n in 2..=self.exact.len() {
            out.push(Point {
                n,
                value: hp::from_ubig(&self.exact[n - 1], self.precision)
                    / hp::from_ubig(&self.exact[n - 2], self.precision),
                predicted: false,
            });
        }
        let base = self.exact.len();
        if !self.extended_ratios.is_empty() {
            for (i, p) in self.extended_ratios.iter().enumerate() {
                out.push(Point {
                    n: base + 1 + i,
                    value: hp::set_precision(&p.value, self.precision),
                    predicted: true,
                });
            }
        } else if base >= 1 {
            for n in base + 1..=self.total_len() {
                let (a, b) = (self.coefficient(n).unwrap(), self.coefficient(n - 1).unwrap());
                out.push(Point {
                    n,
                    value: a.value / b.value,
                    predicted: true,
                });
            }
        }
        if let Some(l) = limit {
            out.retain(|p| p.n <= l);
        }
        out
    }

    /// Writes exact terms one per line, then predicted terms as comments so
    /// that readers of plain series files see only the exact part.
    pub fn write(&self, mut w: impl Write) -> io::Result<()> {
        for v in &self.exact {
            writeln!(w, "{v}")?;
        }
        let base = self.exact.len();
        for (i, p) in self.extended.iter().enumerate() {
            writeln!(
                w,
                "# predicted, errbar={}, n={}, value={}",
                format_sci(&p.errbar, OUTPUT_DIGITS),
                base + 1 + i,
                format_sci(&p.value, OUTPUT_DIGITS)
            )?;
        }
        for (i, p) in self.extended_ratios.iter().enumerate() {
            writeln!(
                w,
                "# predicted ratio, errbar={}, n={}, value={}",
                format_sci(&p.errbar, OUTPUT_DIGITS),
                base + 1 + i,
                format_sci(&p.value, OUTPUT_DIGITS)
            )?;
        }
        Ok(())
    }

    pub fn read(r: impl BufRead, precision: usize) -> Result<Series, SeriesFileError> {
        let mut s = Series::new(Vec::new(), precision);
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            let t = line.trim();
            let bad = |message: &str| SeriesFileError::Malformed {
                line: i + 1,
                message: message.to_string(),
            };
            if t.is_empty() {
                continue;
            }
            if let Some(rest) = t.strip_prefix('#') {
                let rest = rest.trim();
                let (is_ratio, fields) = if let Some(f) = rest.strip_prefix("predicted ratio,") {
                    (true, f)
                } else if let Some(f) = rest.strip_prefix("predicted,") {
                    (false, f)
                } else {
                    continue;
                };
                let (mut errbar, mut n, mut value) = (None, None, None);
                for kv in fields.split(',') {
                    let (k, v) = kv.split_once('=').ok_or_else(|| bad("expected key=value"))?;
                    match k.trim() {
                        "errbar" => errbar = hp::parse(v, precision),
                        "n" => n = v.trim().parse::<usize>().ok(),
                        "value" => value = hp::parse(v, precision),
                        _ => return Err(bad("unknown field")),
                    }
                }
                let (errbar, n, value) = match (errbar, n, value) {
                    (Some(e), Some(n), Some(v)) => (e, n, v),
                    _ => return Err(bad("incomplete predicted entry")),
                };
                let list = if is_ratio {
                    &mut s.extended_ratios
                } else {
                    &mut s.extended
                };
                if n != s.exact.len() + list.len() + 1 {
                    return Err(bad("predicted entries out of order"));
                }
                list.push(Predicted { value, errbar });
                continue;
            }
            if !s.extended.is_empty() || !s.extended_ratios.is_empty() {
                return Err(bad("exact term after predicted terms"));
            }
            let v: UBig = t.parse().map_err(|_| bad("not a non-negative integer"))?;
            s.exact.push(v);
        }
        Ok(s)
    }
}
