//! Numeric representations.
//!
//! Verification paths run on [`Rational`] (arbitrary precision, always in
//! lowest terms); solver inner loops run on `f64`. Converting exact values to
//! floats is allowed; there is deliberately no conversion the other way.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Anything that can be stored in a [`GridFn`](crate::GridFn) and convolved.
pub trait Weight:
    Clone + fmt::Debug + PartialOrd + Zero + Add<Output = Self> + Mul<Output = Self> + Send + Sync
{
}

impl<T> Weight for T where
    T: Clone + fmt::Debug + PartialOrd + Zero + Add<Output = T> + Mul<Output = T> + Send + Sync
{
}

/// An ordered field: either exact rationals or binary64 floats.
pub trait Scalar:
    Weight + One + Sub<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    /// True for the exact rational representation.
    const EXACT: bool;

    fn from_int(n: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }

    fn to_f64(&self) -> f64;

    fn to_number(&self) -> Number;

    fn abs_value(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Integer power by repeated squaring.
    fn powi(&self, mut exp: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            exp >>= 1;
        }
        acc
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_int(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn to_number(&self) -> Number {
        Number::Exact(self.clone())
    }

    fn abs_value(&self) -> Self {
        self.abs()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_int(n: i64) -> Self {
        n as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_number(&self) -> Number {
        Number::Float(*self)
    }

    fn abs_value(&self) -> Self {
        self.abs()
    }
}

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::from_ratio(num, den)
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `binom(n, k)` evaluated in the scalar type by the multiplicative formula.
pub fn binomial_in<T: Scalar>(n: usize, k: usize) -> T {
    if k > n {
        return T::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(T::one(), |acc, i| acc * T::from_int((n - i) as i64) / T::from_int(i as i64 + 1))
}

/// Parses `p/q`, an integer, or a plain decimal literal such as `0.375`.
/// Decimal literals are read exactly from their digits.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::invalid(format!("not a rational literal: `{s}`"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::ZeroDenominator { coordinate: None });
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let negative = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        if !frac.chars().all(|c| c.is_ascii_digit())
            || !int_digits.chars().all(|c| c.is_ascii_digit())
            || (int_digits.is_empty() && frac.is_empty())
        {
            return Err(bad());
        }
        let digits = format!("{int_digits}{frac}");
        let mut num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| bad())?;
        if negative {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10u32), frac.len());
        return Ok(Rational::new(num, den));
    }
    BigInt::from_str(s).map(Rational::from_integer).map_err(|_| bad())
}

/// A reported numeric value, exact or floating.
///
/// Serializes as `{"exact": "p/q", "decimal": x}` for exact values and
/// `{"decimal": x}` for floats.
#[derive(Clone, Debug, PartialEq)]
pub enum Number {
    Exact(Rational),
    Float(f64),
}

impl Number {
    pub fn to_f64(&self) -> f64 {
        match self {
            Number::Exact(r) => Scalar::to_f64(r),
            Number::Float(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Number::Exact(r) => Some(r),
            Number::Float(_) => None,
        }
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Number::Exact(r) => write!(f, "{} (~{:.12})", r, Scalar::to_f64(r)),
            Number::Float(x) => write!(f, "{x:.12}"),
        }
    }
}

impl From<Rational> for Number {
    fn from(r: Rational) -> Self {
        Number::Exact(r)
    }
}

impl From<f64> for Number {
    fn from(x: f64) -> Self {
        Number::Float(x)
    }
}

#[derive(Serialize, Deserialize)]
struct NumberRepr {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    exact: Option<String>,
    decimal: f64,
}

impl Serialize for Number {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match self {
            Number::Exact(r) => NumberRepr { exact: Some(r.to_string()), decimal: Scalar::to_f64(r) },
            Number::Float(x) => NumberRepr { exact: None, decimal: *x },
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Number {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = NumberRepr::deserialize(deserializer)?;
        match repr.exact {
            Some(s) => parse_rational(&s).map(Number::Exact).map_err(serde::de::Error::custom),
            None => Ok(Number::Float(repr.decimal)),
        }
    }
}

/// Serde adapter for plain rational fields, rendered as `"p/q"`.
pub mod rational_str {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Vec<Rational>`.
pub mod rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|r| r.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| parse_rational(s).map_err(serde::de::Error::custom)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_are_reduced() {
        let r = rational(6, -8);
        assert_eq!(r.to_string(), "-3/4");
        assert!(r.denom() > &BigInt::zero());
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("4/9").unwrap(), rational(4, 9));
        assert_eq!(parse_rational(" 12 ").unwrap(), rational(12, 1));
        assert_eq!(parse_rational("0.375").unwrap(), rational(3, 8));
        assert_eq!(parse_rational("-1.5").unwrap(), rational(-3, 2));
        assert_eq!(parse_rational(".5").unwrap(), rational(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.2.3").is_err());
    }

    #[test]
    fn binomial_small() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(8, 4), BigInt::from(70));
        assert_eq!(binomial(3, 5), BigInt::zero());
    }

    #[test]
    fn powi_matches_repeated_product() {
        let x = rational(24, 25);
        assert_eq!(x.powi(2), rational(576, 625));
        assert_eq!(2.0f64.powi(10), 1024.0);
        assert_eq!(Scalar::powi(&rational(3, 2), 0), rational(1, 1));
    }

    #[test]
    fn number_json_round_trip() {
        for n in [Number::Exact(rational(216, 625)), Number::Float(0.1 + 0.2)] {
            let s = serde_json::to_string(&n).unwrap();
            let back: Number = serde_json::from_str(&s).unwrap();
            assert_eq!(back, n);
        }
        let s = serde_json::to_string(&Number::Exact(rational(4, 9))).unwrap();
        assert!(s.contains("\"exact\":\"4/9\""));
    }
}
