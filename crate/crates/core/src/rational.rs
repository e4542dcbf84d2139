//! Exact rationals and their fraction-string encoding.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

/// Parses `"p/q"` or `"p"`. A zero denominator is an error.
pub fn parse_fraction(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Argument(format!("malformed fraction {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num.parse().map_err(|_| bad())?;
    let d: BigInt = den.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::Argument(format!("zero denominator in {s:?}")));
    }
    Ok(Q::new(n, d))
}

/// Canonical fraction string: `"p/q"` in lowest terms, `"p"` for integers.
pub fn format_fraction(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn in_unit_interval(x: &Q) -> bool {
    !x.is_negative() && *x <= Q::one()
}

/// Serde adapter for `Vec<Q>` as a list of fraction strings.
pub mod fraction_vec {
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    use super::{format_fraction, parse_fraction, Q};

    pub fn serialize<S: Serializer>(v: &[Q], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format_fraction))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|x| parse_fraction(x).map_err(D::Error::custom))
            .collect()
    }
}
