//! Arbitrary-precision rationals: parsing, gcd, and float conversion.
//!
//! Atom positions and lattice spans are kept exact; a floating-point gcd is
//! ill-posed, so everything lattice-related runs on [`Rational`] and only
//! drops to `f64` at the boundary of the numeric pipeline.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational number (arbitrary-precision numerator and positive
/// denominator, always in lowest terms — `BigRational` canonicalizes on
/// construction).
pub type Rational = BigRational;

/// Failure to interpret a string as a rational or decimal number.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal {input:?}: {reason}")]
pub struct ParseRationalError {
    pub input: String,
    pub reason: &'static str,
}

impl ParseRationalError {
    fn new(input: &str, reason: &'static str) -> Self {
        Self {
            input: input.to_owned(),
            reason,
        }
    }
}

/// Parses `"a/b"` (integer numerator, positive integer denominator) or a
/// plain decimal such as `"-1"`, `"0.25"`, `".5"`.
///
/// Decimals convert exactly: `"0.3"` becomes `3/10`. Whitespace, exponents
/// and empty components are rejected.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    if let Some((num, den)) = s.split_once('/') {
        let numer = parse_integer(num).ok_or_else(|| ParseRationalError::new(s, "bad numerator"))?;
        let denom =
            parse_integer(den).ok_or_else(|| ParseRationalError::new(s, "bad denominator"))?;
        if !denom.is_positive() {
            return Err(ParseRationalError::new(s, "denominator must be positive"));
        }
        return Ok(Rational::new(numer, denom));
    }
    parse_decimal(s).ok_or_else(|| ParseRationalError::new(s, "expected `a/b` or a decimal"))
}

fn parse_integer(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit())
        || !frac_part.bytes().all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let mut numer: BigInt = if int_part.is_empty() {
        BigInt::zero()
    } else {
        int_part.parse().ok()?
    };
    let mut denom = BigInt::one();
    for b in frac_part.bytes() {
        numer = numer * 10 + (b - b'0');
        denom *= 10;
    }
    Some(Rational::new(BigInt::from(sign) * numer, denom))
}

/// Greatest common divisor of two non-negative rationals:
/// `gcd(a/b, c/d) = gcd(a*d, c*b) / (b*d)`, reduced.
pub fn rational_gcd(a: &Rational, b: &Rational) -> Rational {
    if a.is_zero() {
        return b.abs();
    }
    if b.is_zero() {
        return a.abs();
    }
    let numer = (a.numer() * b.denom()).gcd(&(b.numer() * a.denom()));
    let denom = a.denom() * b.denom();
    Rational::new(numer, denom)
}

/// Whether `a` is an exact integer multiple of `b` (`b` nonzero).
pub fn divides(b: &Rational, a: &Rational) -> bool {
    (a / b).is_integer()
}

/// Nearest-double conversion.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational value of a finite double.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}
