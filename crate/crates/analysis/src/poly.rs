//! Integer polynomials: exact square-free decomposition and root isolation.
//!
//! Coefficients are stored lowest degree first with no trailing zeros; the
//! zero polynomial is the empty vector.

use std::cmp::Ordering;

use dashu_base::{BitTest, Gcd, UnsignedAbs};
use dashu_int::{IBig, UBig};
use num_complex::Complex64;

use crate::hp::{self, Real};

pub type IPoly = Vec<IBig>;

pub fn trim(mut p: IPoly) -> IPoly {
    while p.last().is_some_and(|c| *c == IBig::ZERO) {
        p.pop();
    }
    p
}

/// Degree, with `None` for the zero polynomial.
pub fn degree(p: &[IBig]) -> Option<usize> {
    p.len().checked_sub(1)
}

pub fn derivative(p: &[IBig]) -> IPoly {
    p.iter().enumerate().skip(1).map(|(i, c)| c * IBig::from(i)).collect()
}

fn sub(a: &[IBig], b: &[IBig]) -> IPoly {
    let n = a.len().max(b.len());
    let zero = IBig::ZERO;
    trim(
        (0..n)
            .map(|i| a.get(i).unwrap_or(&zero) - b.get(i).unwrap_or(&zero))
            .collect(),
    )
}

/// Gcd of the nonzero coefficients; zero for the zero polynomial.
pub fn content(p: &[IBig]) -> UBig {
    p.iter().filter(|c| **c != IBig::ZERO).fold(UBig::ZERO, |g, c| {
        if g == UBig::ZERO {
            c.unsigned_abs()
        } else {
            g.gcd(&c.unsigned_abs())
        }
    })
}

/// Divides out the content and makes the leading coefficient positive.
pub fn primitive(p: &[IBig]) -> IPoly {
    let p = trim(p.to_vec());
    let Some(lead) = p.last() else { return p };
    let mut g = IBig::from(content(&p));
    if *lead < IBig::ZERO {
        g = -g;
    }
    p.iter().map(|c| c / &g).collect()
}

fn pseudo_remainder(a: &[IBig], b: &[IBig]) -> IPoly {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r = a.to_vec();
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let lr = r.last().unwrap().clone();
        for c in r.iter_mut() {
            *c *= lb;
        }
        for (i, bc) in b.iter().enumerate() {
            r[i + shift] -= &lr * bc;
        }
        r = trim(r);
    }
    r
}

/// Primitive greatest common divisor with positive leading coefficient.
pub fn gcd(a: &[IBig], b: &[IBig]) -> IPoly {
    let (mut a, mut b) = (primitive(a), primitive(b));
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let r = primitive(&pseudo_remainder(&a, &b));
        a = b;
        b = r;
    }
    a
}

/// `a / b` for a primitive `b` dividing `a`.
pub fn div_exact(a: &[IBig], b: &[IBig]) -> IPoly {
    let db = b.len() - 1;
    let mut r = a.to_vec();
    if r.len() <= db {
        assert!(trim(r).is_empty(), "inexact polynomial division");
        return Vec::new();
    }
    let mut q = vec![IBig::ZERO; r.len() - db];
    for s in (0..q.len()).rev() {
        let c = &r[s + db] / &b[db];
        assert_eq!(&c * &b[db], r[s + db], "inexact polynomial division");
        for (i, bc) in b.iter().enumerate() {
            r[i + s] -= &c * bc;
        }
        q[s] = c;
    }
    assert!(trim(r).is_empty(), "inexact polynomial division");
    trim(q)
}

/// Square-free factors `(f_i, i)` with `p = c · Π f_i^i` and each `f_i`
/// primitive of positive degree.
pub fn squarefree(p: &[IBig]) -> Vec<(IPoly, usize)> {
    let f = primitive(p);
    if f.len() <= 1 {
        return Vec::new();
    }
    let df = derivative(&f);
    let g = gcd(&f, &df);
    let mut b = div_exact(&f, &g);
    let c = div_exact(&df, &g);
    let mut d = sub(&c, &derivative(&b));
    let mut out = Vec::new();
    let mut i = 1;
    while b.len() > 1 {
        let a = gcd(&b, &d);
        let nb = div_exact(&b, &a);
        let nc = div_exact(&d, &a);
        if a.len() > 1 {
            out.push((a, i));
        }
        b = nb;
        d = sub(&nc, &derivative(&b));
        i += 1;
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Root {
    pub re: Real,
    /// Exactly zero for real roots.
    pub im: Real,
    pub multiplicity: usize,
    /// A sign change of the exact polynomial brackets this real root within
    /// the working precision.
    pub certified: bool,
}

impl Root {
    pub fn is_real(&self) -> bool {
        hp::is_zero(&self.im)
    }

    pub fn modulus_f64(&self) -> f64 {
        hp::to_f64(&self.re).hypot(hp::to_f64(&self.im))
    }
}

fn log2_abs(x: &IBig) -> f64 {
    let a = x.unsigned_abs();
    let shift = a.bit_len().saturating_sub(60);
    let top = u64::try_from(&(a >> shift)).unwrap();
    (top as f64).log2() + shift as f64
}

/// Roots of a square-free polynomial with nonzero constant term, to double
/// precision, by Aberth iteration on a magnitude-balanced rescaling.
fn aberth(p: &[IBig]) -> Vec<Complex64> {
    let d = p.len() - 1;
    if d == 0 {
        return Vec::new();
    }
    let logs: Vec<Option<f64>> = p.iter().map(|c| (*c != IBig::ZERO).then(|| log2_abs(c))).collect();
    let rho_log = (logs[0].unwrap() - logs[d].unwrap()) / d as f64;
    let scaled_logs: Vec<Option<f64>> = logs
        .iter()
        .enumerate()
        .map(|(i, l)| l.map(|l| l + i as f64 * rho_log))
        .collect();
    let top = scaled_logs.iter().flatten().cloned().fold(f64::MIN, f64::max);
    let c: Vec<f64> = p
        .iter()
        .zip(&scaled_logs)
        .map(|(x, l)| match l {
            Some(l) => {
                let v = (l - top).exp2();
                if *x < IBig::ZERO {
                    -v
                } else {
                    v
                }
            }
            None => 0.0,
        })
        .collect();
    let eval = |z: Complex64| {
        let (mut v, mut dv) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for a in c.iter().rev() {
            dv = dv * z + v;
            v = v * z + a;
        }
        (v, dv)
    };
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / d as f64 + 0.4))
        .collect();
    for _ in 0..1000 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let (v, dv) = eval(z[i]);
            if v == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ratio = v / dv;
            let repulsion: Complex64 = (0..d).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let step = ratio / (1.0 - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm() / z[i].norm().max(1e-300));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    let rho = rho_log.exp2();
    z.into_iter().map(|u| u * rho).collect()
}

fn to_reals(p: &[IBig], prec: usize) -> Vec<Real> {
    p.iter().map(|c| hp::from_ibig(c, prec)).collect()
}

/// `p(x)` and `p'(x)` at a real point.
pub fn eval_real(p: &[Real], x: &Real) -> (Real, Real) {
    let prec = x.precision();
    let (mut v, mut dv) = (hp::int(0, prec), hp::int(0, prec));
    for a in p.iter().rev() {
        dv = &dv * x + &v;
        v = &v * x + a;
    }
    (v, dv)
}

fn eval_complex(p: &[Real], re: &Real, im: &Real) -> ((Real, Real), (Real, Real)) {
    let prec = re.precision();
    let zero = hp::int(0, prec);
    let (mut v, mut dv) = ((zero.clone(), zero.clone()), (zero.clone(), zero));
    let mul = |a: &(Real, Real)| (&a.0 * re - &a.1 * im, &a.0 * im + &a.1 * re);
    for a in p.iter().rev() {
        let t = mul(&dv);
        dv = (t.0 + &v.0, t.1 + &v.1);
        let t = mul(&v);
        v = (t.0 + a, t.1);
    }
    (v, dv)
}

/// Sign of the exact polynomial at the decimal point `x`.
pub fn sign_at(p: &[IBig], x: &Real) -> Ordering {
    let repr = x.repr();
    let (s, e) = (repr.significand().clone(), repr.exponent());
    let d = p.len().saturating_sub(1);
    let ten = IBig::from(10);
    let mut acc = IBig::ZERO;
    let mut sp = IBig::ONE;
    for (i, c) in p.iter().enumerate() {
        // c_i s^i 10^{e i}, scaled by 10^{-e d} when e < 0
        let term = if e >= 0 {
            c * &sp * ten.pow(e as usize * i)
        } else {
            c * &sp * ten.pow((-e) as usize * (d - i))
        };
        acc += term;
        sp *= &s;
    }
    acc.cmp(&IBig::ZERO)
}

fn polish_real(p: &[Real], x0: f64, prec: usize) -> Real {
    let mut x = hp::parse(&format!("{x0:e}"), prec).unwrap();
    let tol = hp::parse(&format!("1e-{}", prec.saturating_sub(4)), prec).unwrap();
    for _ in 0..200 {
        let (v, dv) = eval_real(p, &x);
        if hp::is_zero(&dv) {
            break;
        }
        let step = v / dv;
        x -= &step;
        if hp::abs(&step) <= &tol * hp::abs(&x) {
            break;
        }
    }
    x
}

fn polish_complex(p: &[Real], z0: Complex64, prec: usize) -> (Real, Real) {
    let mut re = hp::parse(&format!("{:e}", z0.re), prec).unwrap();
    let mut im = hp::parse(&format!("{:e}", z0.im), prec).unwrap();
    let tol = hp::parse(&format!("1e-{}", prec.saturating_sub(4)), prec).unwrap();
    for _ in 0..200 {
        let ((vr, vi), (dr, di)) = eval_complex(p, &re, &im);
        let den = &dr * &dr + &di * &di;
        if hp::is_zero(&den) {
            break;
        }
        let sr = (&vr * &dr + &vi * &di) / &den;
        let si = (&vi * &dr - &vr * &di) / &den;
        re -= &sr;
        im -= &si;
        let size = hp::abs(&re) + hp::abs(&im);
        if hp::abs(&sr) + hp::abs(&si) <= &tol * size {
            break;
        }
    }
    (re, im)
}

/// Brackets a real root of the square-free `f` near `x` by a sign change of
/// the exact polynomial.
fn certify(f: &[IBig], x: &Real, prec: usize) -> bool {
    let eps = hp::abs(x) * hp::parse(&format!("1e-{}", prec.saturating_sub(8)), prec).unwrap();
    let (lo, hi) = (x - &eps, x + &eps);
    let (a, b) = (sign_at(f, &lo), sign_at(f, &hi));
    a == Ordering::Equal || b == Ordering::Equal || a != b
}

/// All complex roots with multiplicity, computed at `prec` digits.
pub fn roots(p: &[IBig], prec: usize) -> Vec<Root> {
    let p = trim(p.to_vec());
    let mut out = Vec::new();
    let zeros = p.iter().take_while(|c| **c == IBig::ZERO).count();
    if zeros > 0 && zeros < p.len() {
        out.push(Root {
            re: hp::int(0, prec),
            im: hp::int(0, prec),
            multiplicity: zeros,
            certified: true,
        });
    }
    let wp = prec + 20;
    for (f, mult) in squarefree(&p[zeros..]) {
        let fr = to_reals(&f, wp);
        for z in aberth(&f) {
            if z.im.abs() <= 1e-6 * z.norm() {
                let x = polish_real(&fr, z.re, wp);
                if certify(&f, &x, wp) {
                    if out_has_real(&out, &x, prec) {
                        continue;
                    }
                    out.push(Root {
                        re: hp::set_precision(&x, prec),
                        im: hp::int(0, prec),
                        multiplicity: mult,
                        certified: true,
                    });
                    continue;
                }
            }
            let (re, im) = polish_complex(&fr, z, wp);
            out.push(Root {
                re: hp::set_precision(&re, prec),
                im: hp::set_precision(&im, prec),
                multiplicity: mult,
                certified: false,
            });
        }
    }
    out.sort_by(|a, b| a.modulus_f64().total_cmp(&b.modulus_f64()));
    out
}

fn out_has_real(out: &[Root], x: &Real, prec: usize) -> bool {
    out.iter()
        .any(|r| r.is_real() && hp::agreeing_digits(&r.re, x) > (prec / 2) as f64)
}
