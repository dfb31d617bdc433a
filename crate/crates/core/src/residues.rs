//! Modulus selection, Chinese-remainder reconstruction, and the
//! digit-assisted variant that trades known leading digits for moduli.

use dashu_int::UBig;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResidueError {
    #[error("moduli {0} and {1} are not coprime")]
    ModuliNotCoprime(u64, u64),
    #[error("{residues} residues given for {moduli} moduli")]
    LengthMismatch { residues: usize, moduli: usize },
    #[error("modulus must be at least 2, got {0}")]
    InvalidModulus(u64),
    #[error("no integer in the window matches the residues")]
    NoSolutionInWindow,
    #[error("window of width 10^{width_exponent} is wider than the moduli product")]
    AmbiguousWindow { width_exponent: usize },
    #[error("leading digits {0:?} are not a valid decimal prefix")]
    InvalidDigits(String),
}

/// Moduli used for one reconstruction plus an optional check modulus that
/// is excluded from the CRT and only used to validate its result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModulusSet {
    pub moduli: Vec<u64>,
    pub verification: Option<u64>,
}

impl ModulusSet {
    pub fn new(moduli: Vec<u64>, verification: Option<u64>) -> Result<Self, ResidueError> {
        let mut all = moduli.clone();
        all.extend(verification);
        check_coprime(&all)?;
        Ok(ModulusSet { moduli, verification })
    }

    pub fn product(&self) -> UBig {
        self.moduli.iter().fold(UBig::ONE, |acc, &m| acc * UBig::from(m))
    }

    /// Reconstruction moduli followed by the verification modulus.
    pub fn all(&self) -> Vec<u64> {
        let mut v = self.moduli.clone();
        v.extend(self.verification);
        v
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn check_coprime(moduli: &[u64]) -> Result<(), ResidueError> {
    for &m in moduli {
        if m < 2 {
            return Err(ResidueError::InvalidModulus(m));
        }
    }
    for (i, &a) in moduli.iter().enumerate() {
        for &b in &moduli[i + 1..] {
            if gcd(a, b) != 1 {
                return Err(ResidueError::ModuliNotCoprime(a, b));
            }
        }
    }
    Ok(())
}

/// Deterministic trial division; only used on 16-bit candidates.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Primes below 2^16 in descending order.
pub fn primes_below_2_16() -> impl Iterator<Item = u64> {
    (2..1u64 << 16).rev().filter(|&m| is_prime(m))
}

/// Heuristic magnitude bound `16^n` used when choosing moduli.
pub fn heuristic_bound(n: usize) -> UBig {
    UBig::ONE << (4 * n)
}

/// Bound used to reject a modulus set outright: `min(n!, 16^n)`. The
/// factorial part is a hard bound on the count of length-`n` permutations.
pub fn magnitude_bound(n: usize) -> UBig {
    let fact = (1..=n).fold(UBig::ONE, |acc, i| acc * UBig::from(i));
    fact.min(heuristic_bound(n))
}

/// Largest primes below 2^16 until their product exceeds `16^n`, plus the
/// next prime as a verification modulus.
pub fn select_moduli(n: usize) -> ModulusSet {
    let bound = heuristic_bound(n.max(1));
    let mut primes = primes_below_2_16();
    let mut moduli = Vec::new();
    let mut product = UBig::ONE;
    while product <= bound {
        let p = primes.next().expect("enough 16-bit primes");
        product *= UBig::from(p);
        moduli.push(p);
    }
    let verification = primes.next();
    ModulusSet { moduli, verification }
}

/// Inverse of `a` modulo `m` (`gcd(a, m) = 1`), by extended Euclid.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

fn ubig_mod(x: &UBig, m: u64) -> u64 {
    let r: UBig = x % UBig::from(m);
    u64::try_from(&r).expect("remainder below modulus")
}

/// The unique `x` in `[0, Π moduli)` with `x ≡ residues[i] (mod moduli[i])`.
///
/// Residues are reduced first, so callers may pass unreduced values.
pub fn crt(residues: &[u64], moduli: &[u64]) -> Result<UBig, ResidueError> {
    if residues.len() != moduli.len() {
        return Err(ResidueError::LengthMismatch {
            residues: residues.len(),
            moduli: moduli.len(),
        });
    }
    check_coprime(moduli)?;
    // Garner-style incremental lift.
    let mut x = UBig::ZERO;
    let mut product = UBig::ONE;
    for (&r, &m) in residues.iter().zip(moduli) {
        let r = r % m;
        let x_mod = ubig_mod(&x, m);
        let p_mod = ubig_mod(&product, m);
        let inv = mod_inverse(p_mod, m).expect("coprime moduli");
        let diff = (r + m - x_mod) % m;
        let t = (diff as u128 * inv as u128 % m as u128) as u64;
        x += &product * UBig::from(t);
        product *= UBig::from(m);
    }
    Ok(x)
}

/// Reconstructs a value known to start with `leading_digits` and to have
/// `magnitude_exponent + 1` decimal digits, using residues only to fix the
/// unknown low digits.
///
/// The window `[D·10^w, (D+1)·10^w)`, `w = magnitude_exponent + 1 - d`, must
/// be no wider than the product of the moduli.
pub fn digit_assisted_reconstruct(
    residues: &[u64],
    moduli: &[u64],
    leading_digits: &str,
    magnitude_exponent: usize,
) -> Result<UBig, ResidueError> {
    let d = leading_digits.len();
    if d == 0 || !leading_digits.bytes().all(|b| b.is_ascii_digit()) || d > magnitude_exponent + 1 {
        return Err(ResidueError::InvalidDigits(leading_digits.to_string()));
    }
    let prefix: UBig = leading_digits
        .parse()
        .map_err(|_| ResidueError::InvalidDigits(leading_digits.to_string()))?;
    let width_exponent = magnitude_exponent + 1 - d;
    let width = UBig::from(10u8).pow(width_exponent);
    let product = moduli.iter().fold(UBig::ONE, |acc, &m| acc * UBig::from(m));
    if width > product {
        return Err(ResidueError::AmbiguousWindow { width_exponent });
    }
    let x0 = crt(residues, moduli)?;
    let lo = prefix * &width;
    // Smallest value ≥ lo congruent to x0 modulo the product.
    let lo_mod = &lo % &product;
    let shift = if x0 >= lo_mod {
        &x0 - &lo_mod
    } else {
        &x0 + &product - &lo_mod
    };
    let candidate = lo.clone() + shift;
    if candidate < lo + width {
        Ok(candidate)
    } else {
        Err(ResidueError::NoSolutionInWindow)
    }
}

/// Residue of a big integer, for building test vectors and checks.
pub fn reduce(x: &UBig, m: u64) -> u64 {
    ubig_mod(x, m)
}
