//! Exact rational numbers and their string encoding (`"p"` or `"p/q"`).

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}`")]
pub struct RationalParseError(pub String);

/// Parses `"p"` or `"p/q"` with `q > 0`. Leading `-` is allowed on `p` only.
pub fn parse_rational(text: &str) -> Result<Rational, RationalParseError> {
    let err = || RationalParseError(text.to_string());
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (text, None),
    };
    let digits = num.strip_prefix('-').unwrap_or(num);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    let numerator: BigInt = num.parse().map_err(|_| err())?;
    let denominator: BigInt = match den {
        Some(d) => {
            if d.is_empty() || !d.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err());
            }
            d.parse().map_err(|_| err())?
        }
        None => BigInt::one(),
    };
    if denominator.is_zero() {
        return Err(err());
    }
    Ok(Rational::new(numerator, denominator))
}

pub fn format_rational(value: &Rational) -> String {
    value.to_string()
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn ratio(numerator: i64, denominator: i64) -> Rational {
    Rational::new(BigInt::from(numerator), BigInt::from(denominator))
}

pub fn is_nonnegative(value: &Rational) -> bool {
    !value.is_negative()
}

/// Serde adapter for a single rational stored as a string.
pub mod as_string {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Rational, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}
