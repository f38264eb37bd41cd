//! Exact rational helpers shared by every module.
//!
//! Rationals are written as `"num/den"` strings on the wire. Parsing also
//! accepts plain integers (`"7"`) and finite decimals (`"1.25"`), which are
//! converted exactly.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact conversion of a finite float (every f64 is a dyadic rational).
pub fn from_f64(x: f64) -> Result<Rational> {
    Rational::from_float(x).ok_or_else(|| Error::invalid(format!("non-finite value {x}")))
}

pub fn to_f64(x: &Rational) -> f64 {
    match x.to_f64() {
        Some(v) => v,
        // Very large numerators/denominators can fail the direct route.
        None => {
            let n = x.numer().to_f64().unwrap_or(f64::NAN);
            let d = x.denom().to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

/// `base^exp` for a signed exponent; `base` must be nonzero when `exp < 0`.
pub fn pow(base: &Rational, exp: i64) -> Rational {
    if exp == 0 {
        return Rational::one();
    }
    let mag = num_traits::pow(base.clone(), exp.unsigned_abs() as usize);
    if exp > 0 {
        mag
    } else {
        mag.recip()
    }
}

/// Formats as `num/den` with the denominator always present.
pub fn format(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::invalid(format!("cannot parse rational {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::invalid(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Ok(n) = BigInt::from_str(s) {
        return Ok(Rational::from_integer(n));
    }
    parse_decimal(s).ok_or_else(bad)
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exp10) = match s.find(['e', 'E']) {
        Some(k) => (&s[..k], s[k + 1..].parse::<i64>().ok()?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{whole}{frac}");
    let mut value = Rational::from_integer(BigInt::from_str(&digits).ok()?);
    value *= pow(&int(10), exp10 - frac.len() as i64);
    Some(if neg { -value } else { value })
}

/// Smallest rational with denominator `10^digits` that is `>= x`.
pub fn ceil_decimal(x: &Rational, digits: u32) -> Rational {
    let scale = Rational::from_integer(num_traits::pow(BigInt::from(10), digits as usize));
    (x * &scale).ceil() / scale
}

pub fn is_nonnegative(x: &Rational) -> bool {
    !x.is_negative()
}

/// Serde adapter: rationals as `"num/den"` strings; numbers are also accepted on input.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let v = RationalRepr::deserialize(d)?;
        v.into_rational().map_err(serde::de::Error::custom)
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    pub(crate) enum RationalRepr {
        Text(String),
        Int(i64),
        Float(f64),
    }

    impl RationalRepr {
        pub(crate) fn into_rational(self) -> Result<Rational> {
            match self {
                RationalRepr::Text(s) => parse(&s),
                RationalRepr::Int(n) => Ok(int(n)),
                // Go through the shortest decimal representation so 1.1 means 11/10.
                RationalRepr::Float(x) => parse(&format!("{x:?}")),
            }
        }
    }
}

/// Newtype for places that want a serializable rational without field attributes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Q(pub Rational);

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serde_rational::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        serde_rational::deserialize(d).map(Q)
    }
}

impl From<Rational> for Q {
    fn from(x: Rational) -> Self {
        Q(x)
    }
}
