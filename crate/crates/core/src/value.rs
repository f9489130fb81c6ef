//! Exact probability values.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// An exact rational in `[0, 1]`, kept in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QValue(BigRational);

impl QValue {
    pub fn new(value: BigRational) -> Result<Self> {
        if value < BigRational::zero() || value > BigRational::one() {
            return Err(Error::ValueOutOfRange(format_ratio(&value)));
        }
        Ok(Self(value))
    }

    pub fn from_ints(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::InvalidRational(format!("{numer}/{denom}")));
        }
        Self::new(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn one() -> Self {
        Self(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn into_ratio(self) -> BigRational {
        self.0
    }
}

impl fmt::Display for QValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_ratio(&self.0))
    }
}

impl FromStr for QValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::new(parse_ratio(s)?)
    }
}

/// Renders a rational as `p/q`, always with an explicit denominator.
pub fn format_ratio(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p/q` (or a bare integer) into a reduced rational.
pub fn parse_ratio(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidRational(s.to_string());
    let (numer, denom) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let digits = |t: &str| {
        let body = t.strip_prefix('-').unwrap_or(t);
        !body.is_empty() && body.bytes().all(|b| b.is_ascii_digit())
    };
    if !digits(numer) || !digits(denom) {
        return Err(bad());
    }
    let numer: BigInt = numer.parse().map_err(|_| bad())?;
    let denom: BigInt = denom.parse().map_err(|_| bad())?;
    if denom.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(numer, denom))
}

pub fn ratio(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_reduces() {
        let v: QValue = "2/4".parse().unwrap();
        assert_eq!(v.to_string(), "1/2");
        assert_eq!("0".parse::<QValue>().unwrap(), QValue::zero());
        assert_eq!("1/1".parse::<QValue>().unwrap(), QValue::one());
    }

    #[test]
    fn rejects_out_of_range_and_garbage() {
        assert_eq!(
            "5/4".parse::<QValue>(),
            Err(Error::ValueOutOfRange("5/4".into()))
        );
        assert!(matches!(
            "-1/3".parse::<QValue>(),
            Err(Error::ValueOutOfRange(_))
        ));
        for bad in ["1/0", "x", "1/", "/2", "1.5", ""] {
            assert!(
                matches!(bad.parse::<QValue>(), Err(Error::InvalidRational(_))),
                "{bad}"
            );
        }
    }
}
