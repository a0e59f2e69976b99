//! Exact rational helpers and the `"num/den"` wire format.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::ParseError;

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    BigRational::from_integer(BigInt::from(v))
}

/// Canonical wire form: reduced, sign on the numerator, denominator always
/// present (`"0/1"`, `"-1/2"`).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"num/den"`, an integer, or a plain decimal such as `"0.9"`.
/// Decimals are converted exactly.
pub fn parse_rational(s: &str) -> Result<Rational, ParseError> {
    let t = s.trim();
    let bad = || ParseError::Rational(s.to_string());
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{whole}{frac}");
    let numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| bad())?
    };
    let denom = num_traits::pow(BigInt::from(10), frac.len());
    let r = BigRational::new(numer, denom);
    Ok(if neg { -r } else { r })
}

pub fn is_probability(r: &Rational) -> bool {
    !r.is_negative() && *r <= Rational::one()
}
