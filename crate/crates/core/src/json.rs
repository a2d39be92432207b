//! Serde helpers for exact integers.
//!
//! Integers that fit in 64 bits are written as JSON numbers; larger ones are
//! written as decimal strings. Both forms are accepted on input.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::exact::IntegerMatrix;

pub fn bigint_to_value(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => Value::from(v),
        None => Value::String(x.to_string()),
    }
}

pub fn value_to_bigint(v: &Value) -> Option<BigInt> {
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from).or_else(|| n.as_u64().map(BigInt::from)),
        Value::String(s) => {
            let body = s.strip_prefix('-').unwrap_or(s);
            if body.is_empty() || body.len() > 4096 || !body.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            s.parse().ok()
        }
        _ => None,
    }
}

#[derive(Serialize, Deserialize)]
#[serde(transparent)]
struct Exact(#[serde(with = "bigint")] BigInt);

pub mod bigint {
    use super::*;

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        bigint_to_value(x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let v = Value::deserialize(d)?;
        value_to_bigint(&v).ok_or_else(|| de::Error::custom("expected an integer"))
    }
}

pub mod bigint_vec {
    use super::*;

    pub fn serialize<S: Serializer>(xs: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(xs.iter().map(bigint_to_value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let v: Vec<Exact> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(|e| e.0).collect())
    }
}

/// Matrices as arrays of rows.
pub mod matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &IntegerMatrix, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(
            m.to_rows()
                .iter()
                .map(|r| r.iter().map(bigint_to_value).collect::<Vec<_>>()),
        )
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<IntegerMatrix, D::Error> {
        let rows: Vec<Vec<Exact>> = Vec::deserialize(d)?;
        let rows: Vec<Vec<BigInt>> = rows
            .into_iter()
            .map(|r| r.into_iter().map(|e| e.0).collect())
            .collect();
        IntegerMatrix::try_from_rows(&rows).map_err(de::Error::custom)
    }
}

pub fn matrix_to_value(m: &IntegerMatrix) -> Value {
    Value::Array(
        m.to_rows()
            .iter()
            .map(|r| Value::Array(r.iter().map(bigint_to_value).collect()))
            .collect(),
    )
}

pub fn matrix_from_str(s: &str) -> crate::Result<IntegerMatrix> {
    #[derive(Deserialize)]
    #[serde(transparent)]
    struct M(#[serde(with = "matrix")] IntegerMatrix);
    serde_json::from_str::<M>(s)
        .map(|m| m.0)
        .map_err(|e| crate::Error::Parse(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wide_integers_become_strings() {
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        assert_eq!(bigint_to_value(&big), Value::String(big.to_string()));
        assert_eq!(bigint_to_value(&BigInt::from(-7)), Value::from(-7));
        assert_eq!(value_to_bigint(&Value::String(big.to_string())), Some(big));
        assert_eq!(value_to_bigint(&Value::String("1e5".into())), None);
        assert_eq!(value_to_bigint(&Value::from(1.5)), None);
    }

    #[test]
    fn matrix_parse() {
        let m = matrix_from_str("[[1,0],[0,\"-1\"]]").unwrap();
        assert_eq!(m, IntegerMatrix::from_rows(&[[1, 0], [0, -1]]));
        assert!(matrix_from_str("[[1,0],[0]]").is_err());
        assert!(matrix_from_str("{}").is_err());
    }
}
