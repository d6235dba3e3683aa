//! Exact rational numbers used for every power quantity.
//!
//! States hinge on exact equality of support and threat, so nothing in the
//! engine ever touches floating point. Text input accepts integers, `a/b`
//! fractions and plain decimals (`0.25`), all converted without rounding.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational `{input}`: {reason}")]
pub struct ParseRationalError {
    pub input: String,
    pub reason: &'static str,
}

fn fail(input: &str, reason: &'static str) -> ParseRationalError {
    ParseRationalError {
        input: input.to_string(),
        reason,
    }
}

fn parse_int(text: &str, whole: &str) -> Result<BigInt, ParseRationalError> {
    let digits = text.strip_prefix(['+', '-']).unwrap_or(text);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(fail(whole, "expected decimal digits"));
    }
    BigInt::from_str(text).map_err(|_| fail(whole, "expected decimal digits"))
}

/// Parses `7`, `-3/4`, `1.125` or `.5` into an exact rational.
pub fn parse_rational(input: &str) -> Result<Rational, ParseRationalError> {
    let text = input.trim();
    if text.is_empty() {
        return Err(fail(input, "empty string"));
    }
    if let Some((num, den)) = text.split_once('/') {
        let num = parse_int(num.trim(), input)?;
        let den = parse_int(den.trim(), input)?;
        if den.is_zero() {
            return Err(fail(input, "zero denominator"));
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((int_part, frac_part)) = text.split_once('.') {
        let (negative, int_digits) = match int_part.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, int_part.strip_prefix('+').unwrap_or(int_part)),
        };
        if int_digits.is_empty() && frac_part.is_empty() {
            return Err(fail(input, "no digits"));
        }
        if !int_digits.bytes().all(|b| b.is_ascii_digit())
            || !frac_part.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(fail(input, "expected decimal digits"));
        }
        let mut digits = String::with_capacity(int_digits.len() + frac_part.len());
        digits.push_str(int_digits);
        digits.push_str(frac_part);
        let mut num = parse_int(&digits, input)?;
        if negative {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10), frac_part.len());
        return Ok(Rational::new(num, den));
    }
    Ok(Rational::from_integer(parse_int(text, input)?))
}

/// Canonical text form: `n` for integers, `n/d` otherwise.
pub fn format_rational(value: &Rational) -> String {
    value.to_string()
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub(crate) fn sum<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Rational {
    values
        .into_iter()
        .fold(Rational::zero(), |acc, value| acc + value)
}

pub(crate) fn is_negative(value: &Rational) -> bool {
    value.is_negative()
}

pub(crate) fn clamp_at_zero(value: Rational) -> Rational {
    if value.is_negative() {
        Rational::zero()
    } else {
        value
    }
}
