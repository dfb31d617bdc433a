//! Fixed-precision decimal reals.
//!
//! Every value built here carries an explicit precision; dashu treats
//! integer-derived floats as unlimited, which transcendental functions reject.

use dashu_base::{Abs, Sign};
use dashu_float::DBig;
use dashu_int::{IBig, UBig};

pub type Real = DBig;

/// Significant decimal digits used when no precision is given.
pub const DEFAULT_PRECISION: usize = 60;

pub fn int(x: i64, prec: usize) -> Real {
    DBig::from(IBig::from(x)).with_precision(prec).value()
}

pub fn from_ubig(x: &UBig, prec: usize) -> Real {
    DBig::from(x.clone()).with_precision(prec).value()
}

pub fn from_ibig(x: &IBig, prec: usize) -> Real {
    DBig::from(x.clone()).with_precision(prec).value()
}

/// `num / den` at the given precision.
pub fn ratio(num: i64, den: i64, prec: usize) -> Real {
    int(num, prec) / int(den, prec)
}

/// Parses a decimal literal such as `11.598` or `-1.5e-3`.
pub fn parse(s: &str, prec: usize) -> Option<Real> {
    s.trim().parse::<DBig>().ok().map(|v| v.with_precision(prec).value())
}

pub fn set_precision(x: &Real, prec: usize) -> Real {
    x.clone().with_precision(prec).value()
}

pub fn abs(x: &Real) -> Real {
    x.clone().abs()
}

pub fn is_positive(x: &Real) -> bool {
    x.sign() == Sign::Positive && !x.repr().significand().is_zero()
}

pub fn is_zero(x: &Real) -> bool {
    x.repr().significand().is_zero()
}

pub fn ln(x: &Real) -> Real {
    x.ln()
}

pub fn exp(x: &Real) -> Real {
    x.exp()
}

pub fn sqrt(x: &Real) -> Real {
    x.sqrt()
}

/// `x^y` for positive `x`.
pub fn powf(x: &Real, y: &Real) -> Real {
    exp(&(y * ln(x)))
}

pub fn to_f64(x: &Real) -> f64 {
    x.to_f64().value()
}

/// Nearest integer.
pub fn round(x: &Real) -> IBig {
    x.round().to_int().value()
}

/// Scientific notation with `digits` significant digits, e.g. `1.2340e-5`.
pub fn format_sci(x: &Real, digits: usize) -> String {
    let digits = digits.max(1);
    let r = x.clone().with_precision(digits).value();
    let repr = r.repr();
    if repr.significand().is_zero() {
        return format!("0.{}e0", "0".repeat(digits - 1));
    }
    let sig = repr.significand();
    let neg = sig.sign() == Sign::Negative;
    let mut s = sig.clone().abs().to_string();
    let exp = repr.exponent() + s.len() as isize - 1;
    // at most `digits` digits after rounding; pad trailing zeros
    s.push_str(&"0".repeat(digits.saturating_sub(s.len())));
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push_str(&s[..1]);
    if digits > 1 {
        out.push('.');
        out.push_str(&s[1..]);
    }
    out.push_str(&format!("e{exp}"));
    out
}

/// `-log10 |a - b| / |b|`: the number of agreeing significant digits.
pub fn agreeing_digits(a: &Real, b: &Real) -> f64 {
    if a == b {
        return f64::INFINITY;
    }
    let rel = abs(&(a - b)) / abs(b);
    let r = to_f64(&rel);
    if r > 0.0 {
        -r.log10()
    } else {
        // below f64 range
        let e = rel.repr().exponent() + rel.repr().significand().to_string().len() as isize;
        -(e as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transcendental_values() {
        let p = 70;
        let ln2 = ln(&int(2, p));
        let want = parse("0.693147180559945309417232121458176568075500134360255254120680009", p).unwrap();
        assert!(agreeing_digits(&ln2, &want) > 60.0);
        let e = exp(&int(1, p));
        let want = parse("2.71828182845904523536028747135266249775724709369995957496696763", p).unwrap();
        assert!(agreeing_digits(&e, &want) > 60.0);
        assert!(agreeing_digits(&powf(&int(4, p), &ratio(1, 2, p)), &int(2, p)) > 60.0);
    }

    #[test]
    fn scientific_format() {
        let p = 40;
        assert_eq!(format_sci(&ratio(1, 3, p), 5), "3.3333e-1");
        assert_eq!(format_sci(&ratio(-2, 3, p), 3), "-6.67e-1");
        assert_eq!(format_sci(&int(123456, p), 3), "1.23e5");
        assert_eq!(format_sci(&int(7, p), 4), "7.000e0");
        assert_eq!(format_sci(&int(0, p), 3), "0.00e0");
        assert_eq!(format_sci(&ratio(99999, 100000, p), 3), "1.00e0");
    }

    #[test]
    fn rounding_and_conversion() {
        let p = 30;
        assert_eq!(round(&ratio(7, 2, p)), IBig::from(4));
        assert_eq!(round(&ratio(-7, 3, p)), IBig::from(-2));
        assert!((to_f64(&ratio(1, 8, p)) - 0.125).abs() < 1e-18);
        assert!(is_positive(&ratio(1, 8, p)));
        assert!(!is_positive(&int(0, p)));
    }
}
