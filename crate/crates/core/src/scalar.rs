//! Numeric backends for transition weights.
//!
//! Every measure carries its weights either as exact rationals or as binary64
//! floats. Algorithms that only need field arithmetic are written once against
//! [`Scalar`]; the polynomial machinery is exact-only.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms.
pub type Rational = BigRational;

/// Field element usable as a transition weight.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + num_traits::Num
    + Signed
    + for<'a> std::ops::Mul<&'a Self, Output = Self>
    + Send
    + Sync
    + 'static
{
    /// `true` when arithmetic is exact.
    const EXACT: bool;

    fn to_f64(&self) -> f64;

    fn from_rational(r: &Rational) -> Self;

    /// Exact rational value of `self` (binary64 values are dyadic rationals).
    fn to_rational(&self) -> Rational;

    /// Tolerant equality: exact for rationals, absolute `tol` for floats.
    fn approx_eq(&self, other: &Self, tol: f64) -> bool;
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_rational(&self) -> Rational {
        self.clone()
    }

    fn approx_eq(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }

    fn to_rational(&self) -> Rational {
        Rational::from_float(*self).unwrap_or_else(Rational::zero)
    }

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self - other).abs() <= tol
    }
}

/// Conversion that survives numerators and denominators far outside the
/// binary64 range.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let n = r.numer().abs();
    let d = r.denom();
    // quotient scaled to roughly 64 significant bits
    let k = 64 + d.bits() as i64 - n.bits() as i64;
    let q = if k >= 0 {
        (n << k as usize) / d
    } else {
        n / (d << (-k) as usize)
    };
    let mut value = q.to_f64().unwrap_or(f64::INFINITY);
    let mut e = -k;
    while e != 0 {
        let step = e.clamp(-1000, 1000);
        value *= 2f64.powi(step as i32);
        e -= step;
    }
    if r.is_negative() {
        -value
    } else {
        value
    }
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"3"`, `"-9/10"`, `"0.35"`, `"1.5e-3"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::ParseScalar(text.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(at) => {
            let e: i32 = s[at + 1..].parse().map_err(|_| bad())?;
            (&s[..at], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, fraction) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && fraction.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(fraction.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: BigInt = format!("{whole}{fraction}0").parse().map_err(|_| bad())?;
    let scale = fraction.len() as i32 + 1 - exponent;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        Rational::new(all, num_traits::pow(ten, scale as usize))
    } else {
        Rational::from_integer(all * num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        value = -value;
    }
    Ok(value)
}

/// Renders a rational as `n` or `n/d`.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("9/10").unwrap(), frac(9, 10));
        assert_eq!(parse_rational("0.35").unwrap(), frac(7, 20));
        assert_eq!(parse_rational("0").unwrap(), int(0));
        assert_eq!(parse_rational("-2").unwrap(), int(-2));
        assert_eq!(parse_rational(".05").unwrap(), frac(1, 20));
        assert_eq!(parse_rational("1.5e-3").unwrap(), frac(3, 2000));
        assert_eq!(parse_rational("2E2").unwrap(), int(200));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1..2").is_err());
    }

    #[test]
    fn f64_round_trip_is_exact() {
        let x = 0.1f64;
        assert_eq!(Scalar::to_f64(&x.to_rational()), x);
        assert_eq!(format_rational(&frac(6, 55)), "6/55");
        assert_eq!(format_rational(&int(4)), "4");
    }

    #[test]
    fn converts_huge_rationals() {
        let big = num_traits::pow(BigInt::from(10), 400);
        let r = Rational::new(BigInt::from(3) * &big, BigInt::from(7) * &big);
        assert!((rational_to_f64(&r) - 3.0 / 7.0).abs() < 1e-15);
        let tiny = Rational::new(BigInt::from(1), big.clone());
        assert_eq!(rational_to_f64(&tiny), 0.0);
        let r = Rational::new(BigInt::from(1), num_traits::pow(BigInt::from(10), 300));
        assert!((rational_to_f64(&r) / 1e-300 - 1.0).abs() < 1e-12);
    }
}
