//! Exact decimal arithmetic helpers.
//!
//! Predicate coefficients, system matrices and MILP data are kept as
//! arbitrary-precision rationals so that constraint emission is exact and
//! reproducible. Everything that enters an LP file must have a finite decimal
//! expansion (a reduced denominator of the form 2^a * 5^b); values parsed
//! from decimal text or converted from `f64` always do.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecimalError {
    #[error("invalid decimal literal `{0}`")]
    Invalid(String),
    #[error("value {0} has no finite decimal expansion")]
    NotFiniteDecimal(String),
    #[error("value {0} is not representable as a rational")]
    NotFinite(f64),
}

/// Parses an optionally signed decimal literal (`-12`, `0.125`, `+3.`) into
/// an exact rational.
pub fn parse_decimal(text: &str) -> Result<BigRational, DecimalError> {
    let bad = || DecimalError::Invalid(text.to_string());
    let s = text.trim();
    let (neg, digits) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let mut numer: BigInt = if int_part.is_empty() {
        BigInt::zero()
    } else {
        int_part.parse().map_err(|_| bad())?
    };
    let ten = BigInt::from(10u8);
    for b in frac_part.bytes() {
        numer = numer * &ten + BigInt::from(b - b'0');
    }
    let denom = ten.pow(frac_part.len() as u32);
    let mut r = BigRational::new(numer, denom);
    if neg {
        r = -r;
    }
    Ok(r)
}

/// Converts a finite `f64` to the exact rational of its shortest decimal
/// representation, i.e. `from_f64(0.1)` is exactly 1/10.
pub fn from_f64(value: f64) -> Result<BigRational, DecimalError> {
    if !value.is_finite() {
        return Err(DecimalError::NotFinite(value));
    }
    parse_decimal(&format!("{value}"))
}

/// Exact rational of the f64 bit pattern itself (a binary fraction).
pub fn from_f64_exact(value: f64) -> Result<BigRational, DecimalError> {
    BigRational::from_float(value).ok_or(DecimalError::NotFinite(value))
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Renders `r` as an exact decimal string without an exponent.
///
/// Fails when the reduced denominator contains prime factors other than
/// 2 and 5; such values cannot appear in data parsed through this module.
pub fn to_decimal_string(r: &BigRational) -> Result<String, DecimalError> {
    let mut den = r.denom().clone();
    let two = BigInt::from(2u8);
    let five = BigInt::from(5u8);
    let mut twos = 0u32;
    let mut fives = 0u32;
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return Err(DecimalError::NotFiniteDecimal(r.to_string()));
    }
    let k = twos.max(fives);
    let scale = two.pow(k - twos) * five.pow(k - fives);
    let scaled = r.numer() * scale;
    let (sign, mag) = if scaled.is_negative() {
        ("-", -scaled)
    } else {
        ("", scaled)
    };
    let digits = mag.to_string();
    let k = k as usize;
    let text = if k == 0 {
        digits
    } else {
        let padded = format!("{digits:0>width$}", width = k + 1);
        let split = padded.len() - k;
        let (int_part, frac_part) = padded.split_at(split);
        let frac_part = frac_part.trim_end_matches('0');
        if frac_part.is_empty() {
            int_part.to_string()
        } else {
            format!("{int_part}.{frac_part}")
        }
    };
    Ok(format!("{sign}{text}"))
}

/// `true` when `r` equals an integer.
pub fn is_integer(r: &BigRational) -> bool {
    r.denom().is_one()
}

/// Rounds to the nearest integer, erroring when farther than `tol` from it.
pub fn round_to_i64(r: &BigRational, tol: f64) -> Option<i64> {
    let v = to_f64(r);
    let rounded = v.round();
    if (v - rounded).abs() <= tol {
        Some(rounded as i64)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dec(s: &str) -> BigRational {
        parse_decimal(s).unwrap()
    }

    #[test]
    fn parse_and_render_round_trip() {
        for s in ["0", "-0.1", "20", "1.25", "-3.0625", "0.0001", "123456.789"] {
            let r = dec(s);
            let rendered = to_decimal_string(&r).unwrap();
            assert_eq!(dec(&rendered), r, "{s} -> {rendered}");
        }
        assert_eq!(to_decimal_string(&dec("-0.1")).unwrap(), "-0.1");
        assert_eq!(to_decimal_string(&dec("3.0")).unwrap(), "3");
    }

    #[test]
    fn f64_shortest_display_is_exact_decimal() {
        assert_eq!(from_f64(0.1).unwrap(), BigRational::new(1.into(), 10.into()));
        assert_eq!(from_f64(-20.0).unwrap(), BigRational::from_integer((-20).into()));
        assert!(from_f64(f64::NAN).is_err());
    }

    #[test]
    fn rejects_non_decimal_denominators() {
        let third = BigRational::new(1.into(), 3.into());
        assert!(to_decimal_string(&third).is_err());
    }

    #[test]
    fn rejects_garbage_literals() {
        for s in ["", ".", "1.2.3", "abc", "--1", "1e5"] {
            assert!(parse_decimal(s).is_err(), "{s}");
        }
    }

    #[test]
    fn rounding_guard() {
        assert_eq!(round_to_i64(&dec("4.9999999"), 1e-6), Some(5));
        assert_eq!(round_to_i64(&dec("4.9"), 1e-6), None);
    }
}
