//! Numeric scalars used for matrix coefficients.
//!
//! Two arithmetic modes are supported: exact rationals ([`Rational`]) and
//! binary floats (`f64`). Code that must work in both modes is generic over
//! [`Scalar`]; every tolerance-aware comparison goes through the trait so
//! that the exact mode never rounds and the float mode never compares with
//! `==`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational number.
pub type Rational = num_rational::BigRational;

/// Default comparison tolerance for float mode.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseScalarError {
    #[error("empty numeric literal")]
    Empty,
    #[error("invalid numeric literal `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// A real scalar field element, exact or approximate.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
{
    /// True when arithmetic is closed without rounding.
    const EXACT: bool;

    /// Absolute tolerance for comparisons: zero in exact mode.
    fn tolerance() -> Self;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_usize(n: usize) -> Self;

    fn to_f64(&self) -> f64;

    /// Parses `"p/q"`, integers, decimals and scientific notation.
    /// Decimal text is read exactly in rational mode (`"0.1"` is `1/10`).
    fn parse(text: &str) -> Result<Self, ParseScalarError>;

    /// JSON rendering: a rational string in exact mode, a number otherwise.
    fn to_json(&self) -> serde_json::Value;

    fn abs(&self) -> Self;

    fn is_negligible(&self) -> bool {
        self.abs() <= Self::tolerance()
    }

    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other).is_negligible()
    }

    fn is_positive(&self) -> bool {
        *self > Self::tolerance()
    }

    fn is_negative(&self) -> bool {
        *self < -Self::tolerance()
    }

    /// `self <= other` up to tolerance.
    fn le_tol(&self, other: &Self) -> bool {
        *self <= other.clone() + &Self::tolerance()
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn tolerance() -> Self {
        Rational::zero()
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_usize(n: usize) -> Self {
        Rational::from_integer(BigInt::from(n))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn parse(text: &str) -> Result<Self, ParseScalarError> {
        parse_rational(text)
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.to_string())
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }

    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }

    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }

    fn le_tol(&self, other: &Self) -> bool {
        self <= other
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn tolerance() -> Self {
        FLOAT_TOLERANCE
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_usize(n: usize) -> Self {
        n as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn parse(text: &str) -> Result<Self, ParseScalarError> {
        let text = text.trim();
        if text.is_empty() {
            return Err(ParseScalarError::Empty);
        }
        if let Some((num, den)) = text.split_once('/') {
            let num: f64 = num
                .trim()
                .parse()
                .map_err(|_| ParseScalarError::Invalid(text.to_string()))?;
            let den: f64 = den
                .trim()
                .parse()
                .map_err(|_| ParseScalarError::Invalid(text.to_string()))?;
            if den == 0.0 {
                return Err(ParseScalarError::ZeroDenominator(text.to_string()));
            }
            return Ok(num / den);
        }
        let value: f64 = text
            .parse()
            .map_err(|_| ParseScalarError::Invalid(text.to_string()))?;
        if value.is_finite() {
            Ok(value)
        } else {
            Err(ParseScalarError::Invalid(text.to_string()))
        }
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Number::from_f64(*self)
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null)
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }
}

fn parse_rational(text: &str) -> Result<Rational, ParseScalarError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(ParseScalarError::Empty);
    }
    if let Some((num, den)) = text.split_once('/') {
        let num = parse_decimal(num.trim()).ok_or_else(|| ParseScalarError::Invalid(text.into()))?;
        let den = parse_decimal(den.trim()).ok_or_else(|| ParseScalarError::Invalid(text.into()))?;
        if den.is_zero() {
            return Err(ParseScalarError::ZeroDenominator(text.to_string()));
        }
        return Ok(num / den);
    }
    parse_decimal(text).ok_or_else(|| ParseScalarError::Invalid(text.to_string()))
}

/// Exact decimal reader: `[-+]digits[.digits][(e|E)[-+]digits]`.
fn parse_decimal(text: &str) -> Option<Rational> {
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = all_digits.parse().ok()?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u8);
    let value = if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Some(value)
}

/// Reads a JSON number or string as a scalar.
pub fn scalar_from_json<S: Scalar>(value: &serde_json::Value) -> Result<S, ParseScalarError> {
    match value {
        serde_json::Value::String(s) => S::parse(s),
        serde_json::Value::Number(n) => S::parse(&n.to_string()),
        other => Err(ParseScalarError::Invalid(other.to_string())),
    }
}

/// Shorthand for `p/q` in either mode.
pub fn ratio<S: Scalar>(num: i64, den: i64) -> S {
    S::from_ratio(num, den)
}
