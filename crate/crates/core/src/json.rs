//! Serde adapters for exact numbers.
//!
//! Integers of magnitude at most `2^53` are JSON numbers and larger ones are
//! decimal strings, so no value is rounded by a double-precision reader.
//! Rationals are strings `"p/q"`, or plain integers when `q = 1`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

const SAFE: i64 = 1 << 53;

fn int_value(v: &BigInt) -> serde_json::Value {
    match v.to_i64() {
        Some(x) if x.abs() <= SAFE => serde_json::Value::from(x),
        _ => serde_json::Value::String(v.to_string()),
    }
}

fn rat_value(r: &BigRational) -> serde_json::Value {
    if r.is_integer() {
        int_value(r.numer())
    } else {
        serde_json::Value::String(format!("{}/{}", r.numer(), r.denom()))
    }
}

fn parse_int<E: de::Error>(v: &serde_json::Value) -> Result<BigInt, E> {
    match v {
        serde_json::Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .or_else(|| n.as_u64().map(BigInt::from))
            .ok_or_else(|| E::custom(format!("not an integer: {n}"))),
        serde_json::Value::String(s) => s
            .trim()
            .parse()
            .map_err(|_| E::custom(format!("not an integer: {s:?}"))),
        other => Err(E::custom(format!("not an integer: {other}"))),
    }
}

fn parse_rat<E: de::Error>(v: &serde_json::Value) -> Result<BigRational, E> {
    if let serde_json::Value::String(s) = v {
        if let Some((a, b)) = s.split_once('/') {
            let a: BigInt = a.trim().parse().map_err(|_| E::custom(format!("bad rational {s:?}")))?;
            let b: BigInt = b.trim().parse().map_err(|_| E::custom(format!("bad rational {s:?}")))?;
            if b.is_positive() {
                return Ok(BigRational::new(a, b));
            }
            return Err(E::custom(format!("bad rational {s:?}")));
        }
    }
    parse_int(v).map(BigRational::from_integer)
}

/// Wrapper serialising a [`BigInt`] through [`int`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Int(pub BigInt);

impl Serialize for Int {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        int_value(&self.0).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        parse_int(&serde_json::Value::deserialize(d)?).map(Int)
    }
}

/// Wrapper serialising a [`BigRational`] through [`rat`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rat(pub BigRational);

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        rat_value(&self.0).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        parse_rat(&serde_json::Value::deserialize(d)?).map(Rat)
    }
}

pub mod int {
    use super::*;
    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        int_value(v).serialize(s)
    }
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        Ok(Int::deserialize(d)?.0)
    }
}

pub mod uint {
    use super::*;
    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        int_value(&BigInt::from(v.clone())).serialize(s)
    }
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        Int::deserialize(d)?
            .0
            .to_biguint()
            .ok_or_else(|| de::Error::custom("negative value"))
    }
}

pub mod rat {
    use super::*;
    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        rat_value(v).serialize(s)
    }
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        Ok(Rat::deserialize(d)?.0)
    }
}

pub mod opt_rat {
    use super::*;
    pub fn serialize<S: Serializer>(v: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref().map(rat_value).serialize(s)
    }
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigRational>, D::Error> {
        Ok(Option::<Rat>::deserialize(d)?.map(|r| r.0))
    }
}

pub mod vec_rat {
    use super::*;
    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(rat_value))
    }
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        Ok(Vec::<Rat>::deserialize(d)?.into_iter().map(|r| r.0).collect())
    }
}

/// `Vec<(k, r)>` with an exact rational `r`.
pub mod keyed_rat {
    use super::*;
    pub fn serialize<S: Serializer, K: Serialize>(v: &[(K, BigRational)], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|(k, r)| (k, rat_value(r))))
    }
    pub fn deserialize<'de, D: Deserializer<'de>, K: Deserialize<'de>>(
        d: D,
    ) -> Result<Vec<(K, BigRational)>, D::Error> {
        Ok(Vec::<(K, Rat)>::deserialize(d)?
            .into_iter()
            .map(|(k, r)| (k, r.0))
            .collect())
    }
}

/// `Vec<(P, e)>` prime powers with big primes.
pub mod prime_powers {
    use super::*;
    pub fn serialize<S: Serializer>(v: &[(BigUint, u32)], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|(p, e)| (int_value(&BigInt::from(p.clone())), e)))
    }
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(BigUint, u32)>, D::Error> {
        Vec::<(Int, u32)>::deserialize(d)?
            .into_iter()
            .map(|(p, e)| {
                p.0.to_biguint()
                    .map(|p| (p, e))
                    .ok_or_else(|| de::Error::custom("negative prime"))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug, PartialEq, Serialize, Deserialize)]
    struct T {
        #[serde(with = "int")]
        a: BigInt,
        #[serde(with = "rat")]
        r: BigRational,
        #[serde(with = "vec_rat")]
        v: Vec<BigRational>,
    }

    #[test]
    fn round_trip_and_precision_policy() {
        let big = BigInt::from((1u64 << 53) + 1);
        let t = T {
            a: big.clone(),
            r: BigRational::new(3.into(), 4.into()),
            v: vec![
                BigRational::from_integer(5.into()),
                BigRational::new((-1).into(), 7.into()),
            ],
        };
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(s, r#"{"a":"9007199254740993","r":"3/4","v":[5,"-1/7"]}"#);
        assert_eq!(serde_json::from_str::<T>(&s).unwrap(), t);
        let small = serde_json::to_string(&Int(BigInt::from(-(1i64 << 53)))).unwrap();
        assert_eq!(small, "-9007199254740992");
    }
}
