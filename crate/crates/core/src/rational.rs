//! Exact rational scalars and their canonical string form.
//!
//! Every probability, moment and LP value in the crate is a [`Rational`].
//! The text form is `num/den` in lowest terms (integers print without a
//! denominator); parsing additionally accepts finite decimals such as `0.3`,
//! which are read exactly. Binary floating point is never accepted.

use alloc::format;
use alloc::string::{String, ToString};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Pow, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// Shorthand for a small rational `num/den`. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn uint(v: u64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Parses `a/b`, an integer, or a finite decimal (`-1.25`, `.5`, `3.`).
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || Error::ParseRational(text.to_string());
    let s = text.trim();
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_integer(num.trim()).ok_or_else(bad)?;
        let den = parse_integer(den.trim()).ok_or_else(bad)?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(num, den));
    }
    let (negative, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{whole}{frac}");
    let mantissa = BigInt::parse_bytes(digits.as_bytes(), 10).ok_or_else(bad)?;
    let scale = BigInt::from(10u32).pow(frac.len() as u32);
    let value = Rational::new(mantissa, scale);
    Ok(if negative { -value } else { value })
}

fn parse_integer(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::parse_bytes(s.as_bytes(), 10)
}

/// Canonical `num/den` text; identical to the `Display` impl of [`Rational`].
pub fn format_rational(value: &Rational) -> String {
    value.to_string()
}

/// Rounds `value` to `sig` significant decimal digits (half away from zero).
///
/// Positional notation is used for moderate magnitudes, scientific otherwise.
pub fn format_decimal(value: &Rational, sig: usize) -> String {
    assert!(sig > 0, "at least one significant digit");
    if value.is_zero() {
        return "0".to_string();
    }
    let negative = value.is_negative();
    let magnitude = value.abs();
    // Estimate the decimal exponent from bit lengths, then correct exactly.
    let bits = magnitude.numer().bits() as i64 - magnitude.denom().bits() as i64;
    let mut exp10 = (bits as f64 * core::f64::consts::LOG10_2).floor() as i64 - 1;
    let ten = BigUint::from(10u32);
    let (digits, exp10) = loop {
        // digits = round(|v| * 10^(sig - 1 - exp10))
        let shift = sig as i64 - 1 - exp10;
        let scaled = scale_by_pow10(&magnitude, shift);
        let rounded = round_half_up(&scaled);
        let lower = ten.clone().pow(sig as u32 - 1);
        let upper = ten.clone().pow(sig as u32);
        if rounded < lower {
            exp10 -= 1;
        } else if rounded >= upper {
            exp10 += 1;
        } else {
            break (rounded, exp10);
        }
    };
    let text = digits.to_str_radix(10);
    let out = if (-6..21).contains(&exp10) {
        if exp10 >= 0 {
            let point = exp10 as usize + 1;
            if point < text.len() {
                trim_fraction(format!("{}.{}", &text[..point], &text[point..]))
            } else {
                let mut s = text;
                s.extend(core::iter::repeat_n('0', point - s.len()));
                s
            }
        } else {
            let zeros: String = "0".repeat((-exp10 - 1) as usize);
            trim_fraction(format!("0.{zeros}{text}"))
        }
    } else {
        let mantissa = trim_fraction(format!("{}.{}", &text[..1], &text[1..]));
        format!("{mantissa}e{exp10}")
    };
    if negative {
        format!("-{out}")
    } else {
        out
    }
}

fn trim_fraction(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let trimmed = s.trim_end_matches('0').trim_end_matches('.');
    trimmed.to_string()
}

fn scale_by_pow10(value: &Rational, shift: i64) -> Rational {
    let factor = BigInt::from(10u32).pow(shift.unsigned_abs() as u32);
    if shift >= 0 {
        value * Rational::from_integer(factor)
    } else {
        value / Rational::from_integer(factor)
    }
}

fn round_half_up(value: &Rational) -> BigUint {
    let (q, r) = value.numer().div_rem(value.denom());
    let twice = r * 2u32;
    let q = if twice >= *value.denom() { q + 1u32 } else { q };
    q.to_biguint().expect("non-negative")
}

/// Floor of a rational as a big integer.
pub fn floor(value: &Rational) -> BigInt {
    value.numer().div_floor(value.denom())
}

pub fn ceil(value: &Rational) -> BigInt {
    -((-value.numer()).div_floor(value.denom()))
}

/// `base^exp` for a non-negative exponent.
pub fn pow(base: &Rational, exp: u64) -> Rational {
    if exp == 0 {
        return Rational::one();
    }
    Pow::pow(base, exp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("1/6").unwrap(), rat(1, 6));
        assert_eq!(parse_rational("2/12").unwrap(), rat(1, 6));
        assert_eq!(parse_rational("0.3").unwrap(), rat(3, 10));
        assert_eq!(parse_rational("-1.25").unwrap(), rat(-5, 4));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("6").unwrap(), int(6));
        assert_eq!(parse_rational("6/1").unwrap(), int(6));
    }

    #[test]
    fn rejects_floats_and_garbage() {
        for s in ["", "1e-3", "nan", "0.1f", "1/0", "1/2/3", "--1", ".", "0x10", "1 /"] {
            assert!(parse_rational(s).is_err(), "{s}");
        }
    }

    #[test]
    fn canonical_form() {
        assert_eq!(format_rational(&rat(2, 12)), "1/6");
        assert_eq!(format_rational(&int(6)), "6");
        assert_eq!(format_rational(&rat(-3, 9)), "-1/3");
    }

    #[test]
    fn decimal_rounding() {
        assert_eq!(format_decimal(&rat(1, 3), 5), "0.33333");
        assert_eq!(format_decimal(&rat(2, 3), 3), "0.667");
        assert_eq!(format_decimal(&rat(6, 5), 15), "1.2");
        assert_eq!(format_decimal(&rat(-1, 8), 2), "-0.13");
        assert_eq!(format_decimal(&int(123456), 3), "123000");
        assert_eq!(format_decimal(&rat(1, 1540), 4), "0.0006494");
        assert_eq!(format_decimal(&rat(1, 10_000_000_000), 2), "1e-10");
        assert_eq!(format_decimal(&rat(999_999, 1_000_000), 3), "1");
    }

    #[test]
    fn floor_and_ceil() {
        assert_eq!(floor(&rat(-7, 2)), BigInt::from(-4));
        assert_eq!(ceil(&rat(-7, 2)), BigInt::from(-3));
        assert_eq!(ceil(&rat(7, 2)), BigInt::from(4));
        assert_eq!(floor(&int(3)), BigInt::from(3));
    }

    proptest::proptest! {
        #[test]
        fn text_round_trip(n in -10_000i64..10_000, d in 1i64..10_000) {
            let v = rat(n, d);
            let s = format_rational(&v);
            proptest::prop_assert_eq!(parse_rational(&s).unwrap(), v.clone());
            proptest::prop_assert_eq!(format_rational(&parse_rational(&s).unwrap()), s);
        }
    }
}
