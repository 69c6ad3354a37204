//! Exact rational scalars and their string encoding.
//!
//! Every rational crossing a file or CLI boundary is written as `"p/q"` in
//! lowest terms, or as a bare integer string when `q = 1`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational {input:?}: {reason}")]
pub struct ParseRationalError {
    pub input: String,
    pub reason: &'static str,
}

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn parse_q(s: &str) -> Result<Q, ParseRationalError> {
    let err = |reason| ParseRationalError { input: s.to_string(), reason };
    let t = s.trim();
    if t.is_empty() {
        return Err(err("empty"));
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| err("bad numerator"))?;
    let den: BigInt = den.parse().map_err(|_| err("bad denominator"))?;
    if den.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok(Q::new(num, den))
}

/// Parses a comma separated list such as `"6/5,-5/2"`.
pub fn parse_q_list(s: &str) -> Result<Vec<Q>, ParseRationalError> {
    s.split(',').map(parse_q).collect()
}

pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn fmt_q_list(v: &[Q]) -> String {
    v.iter().map(fmt_q).collect::<Vec<_>>().join(",")
}

pub fn floor(x: &Q) -> BigInt {
    x.numer().div_floor(x.denom())
}

pub fn ceil(x: &Q) -> BigInt {
    -((-x.numer()).div_floor(x.denom()))
}

pub fn floor_q(x: &Q) -> Q {
    Q::from_integer(floor(x))
}

/// Fractional part in `[0, 1)`.
pub fn frac(x: &Q) -> Q {
    x - floor_q(x)
}

pub fn is_integer(x: &Q) -> bool {
    x.denom().is_one()
}

/// ℓ∞ norm of a rational vector (0 for the empty vector).
pub fn sup_norm(v: &[Q]) -> Q {
    v.iter().map(|x| x.abs()).max().unwrap_or_else(Q::zero)
}

/// Display adapter for rational vectors: `(a, b, c)`.
pub struct QVec<'a>(pub &'a [Q]);

impl fmt::Display for QVec<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", fmt_q(x))?;
        }
        write!(f, ")")
    }
}

/// serde adapter: a rational as a `"p/q"` string.
pub mod serde_q {
    use super::*;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let raw = RawQ::deserialize(d)?;
        raw.into_q().map_err(D::Error::custom)
    }

    /// Accepts `"p/q"` strings and plain JSON integers.
    #[derive(Deserialize)]
    #[serde(untagged)]
    pub(crate) enum RawQ {
        Str(String),
        Int(i64),
    }

    impl RawQ {
        pub(crate) fn into_q(self) -> Result<Q, ParseRationalError> {
            match self {
                RawQ::Str(s) => parse_q(&s),
                RawQ::Int(i) => Ok(qi(i)),
            }
        }
    }
}

/// serde adapter for `Vec<Q>`.
pub mod serde_q_vec {
    use super::serde_q::RawQ;
    use super::*;
    use serde::{de::Error, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Q], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&fmt_q(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
        let raw = Vec::<RawQ>::deserialize(d)?;
        raw.into_iter().map(|r| r.into_q().map_err(D::Error::custom)).collect()
    }
}
