//! JSON encodings shared across the crate: exact rationals as `"a/b"`
//! strings, big integers as decimal strings, cyclotomic numbers as
//! `{ "conductor": n, "coeffs": { k: "a/b" } }`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::exact::rational::{format_rational, parse_rational};
use crate::exact::{CycloNum, Rational};

pub mod rational_str {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = RationalText::deserialize(d)?;
        text.into_rational().map_err(serde::de::Error::custom)
    }
}

pub mod rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(xs: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(xs.iter().map(format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let raw = Vec::<RationalText>::deserialize(d)?;
        raw.into_iter().map(|t| t.into_rational().map_err(serde::de::Error::custom)).collect()
    }
}

pub mod rational_matrix {
    use super::*;

    pub fn serialize<S: Serializer>(xs: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(xs.iter().map(|r| r.iter().map(format_rational).collect::<Vec<_>>()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Rational>>, D::Error> {
        let raw = Vec::<Vec<RationalText>>::deserialize(d)?;
        raw.into_iter()
            .map(|r| r.into_iter().map(|t| t.into_rational().map_err(serde::de::Error::custom)).collect())
            .collect()
    }
}

pub mod bigint_str {
    use super::*;

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let text = RationalText::deserialize(d)?;
        let q = text.into_rational().map_err(serde::de::Error::custom)?;
        if !q.is_integer() {
            return Err(serde::de::Error::custom("expected an integer"));
        }
        Ok(q.to_integer())
    }
}

/// Accepts `"a/b"`, `"a"` or a bare JSON integer.
#[derive(Deserialize)]
#[serde(untagged)]
enum RationalText {
    Text(String),
    Int(i64),
}

impl RationalText {
    fn into_rational(self) -> crate::Result<Rational> {
        match self {
            RationalText::Text(s) => parse_rational(&s),
            RationalText::Int(n) => Ok(Rational::from_integer(BigInt::from(n))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycloJson {
    pub conductor: u64,
    pub coeffs: BTreeMap<u64, String>,
}

impl From<&CycloNum> for CycloJson {
    fn from(z: &CycloNum) -> Self {
        Self {
            conductor: z.conductor(),
            coeffs: z.exponent_map().iter().map(|(k, c)| (*k, format_rational(c))).collect(),
        }
    }
}

impl TryFrom<CycloJson> for CycloNum {
    type Error = crate::Error;

    fn try_from(j: CycloJson) -> crate::Result<Self> {
        if j.conductor == 0 {
            return Err(crate::Error::Parse("conductor must be positive".into()));
        }
        let mut map = BTreeMap::new();
        for (k, c) in j.coeffs {
            if k >= j.conductor {
                return Err(crate::Error::Parse(format!("exponent {k} out of range")));
            }
            map.insert(k, parse_rational(&c)?);
        }
        Ok(CycloNum::from_exponent_map(j.conductor, &map))
    }
}

impl Serialize for CycloNum {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CycloJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycloNum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        CycloNum::try_from(CycloJson::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}
