//! Exact decimal strings, kept alongside their f64 value so that parameter
//! comparisons such as `(q + n + 1) / p == 1` can be decided exactly.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decimal {
    text: String,
    exact: BigRational,
}

impl Decimal {
    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim();
        let exact = parse_exact(trimmed).ok_or_else(|| {
            Error::InvalidArgument(format!("`{text}` is not a decimal number"))
        })?;
        Ok(Decimal {
            text: trimmed.to_string(),
            exact,
        })
    }

    /// Exact value of a finite f64 (its shortest round-trip decimal form).
    pub fn from_f64(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::InvalidArgument(format!("{x} is not finite")));
        }
        Self::parse(&format!("{x:?}"))
    }

    pub fn from_int(x: i64) -> Self {
        Decimal {
            text: x.to_string(),
            exact: BigRational::from_integer(BigInt::from(x)),
        }
    }

    pub fn exact(&self) -> &BigRational {
        &self.exact
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn to_f64(&self) -> f64 {
        // The grammar accepted by `parse_exact` is a subset of Rust's float syntax.
        self.text.parse().expect("validated decimal")
    }
}

fn parse_exact(s: &str) -> Option<BigRational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    if exponent.abs() > 400 {
        return None;
    }
    let (negative, digits) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((a, b)) => (a, b),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let numer: BigInt = all_digits.parse().ok()?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = BigRational::from_integer(numer);
    if scale >= 0 {
        value *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    if negative {
        value = -value;
    }
    Some(value)
}

impl FromStr for Decimal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Decimal::parse(s)
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl Serialize for Decimal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.text)
    }
}

impl<'de> Deserialize<'de> for Decimal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Number(serde_json::Number),
        }
        let text = match Raw::deserialize(deserializer)? {
            Raw::Text(s) => s,
            Raw::Number(n) => n.to_string(),
        };
        Decimal::parse(&text).map_err(serde::de::Error::custom)
    }
}

/// Sign of `value − 1` for an exact rational.
pub fn compare_to_one(value: &BigRational) -> std::cmp::Ordering {
    value.cmp(&BigRational::one())
}

pub fn is_zero(value: &BigRational) -> bool {
    value.is_zero()
}
