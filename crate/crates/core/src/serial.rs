//! Serde adapters: rationals travel as `"p/q"` strings, matrices as
//! row-major arrays of such strings. Plain JSON integers are accepted on
//! input for convenience.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::arith::{format_rational, parse_rational, Integer, Rational};
use crate::matrix::RMatrix;

fn value_to_rational(v: &Value) -> Result<Rational, String> {
    match v {
        Value::String(s) => parse_rational(s).map_err(|e| e.to_string()),
        Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(Rational::from_integer(i.into())),
            None => parse_rational(&n.to_string()).map_err(|e| e.to_string()),
        },
        other => Err(format!("expected a rational, found {other}")),
    }
}

pub fn rational_to_value(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

pub fn vector_to_value(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rational_to_value).collect())
}

pub fn integers_to_value(v: &[Integer]) -> Value {
    Value::Array(
        v.iter()
            .map(|x| match i64::try_from(x) {
                Ok(i) => Value::from(i),
                Err(_) => Value::String(x.to_string()),
            })
            .collect(),
    )
}

pub fn matrix_to_value(m: &RMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| vector_to_value(m.row(i))).collect())
}

pub fn matrix_from_value(v: &Value) -> Result<RMatrix, String> {
    let rows = v.as_array().ok_or("matrix must be an array of rows")?;
    let rows = rows
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| "matrix row must be an array".to_string())?
                .iter()
                .map(value_to_rational)
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    RMatrix::from_rows(rows).map_err(|e| e.to_string())
}

pub mod rational {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        format_rational(r).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let v = Value::deserialize(d)?;
        value_to_rational(&v).map_err(D::Error::custom)
    }
}

pub mod rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        vector_to_value(v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let v = Vec::<Value>::deserialize(d)?;
        v.iter()
            .map(value_to_rational)
            .collect::<Result<_, _>>()
            .map_err(D::Error::custom)
    }
}

pub mod matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &RMatrix, s: S) -> Result<S::Ok, S::Error> {
        matrix_to_value(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<RMatrix, D::Error> {
        let v = Value::deserialize(d)?;
        matrix_from_value(&v).map_err(D::Error::custom)
    }
}

pub mod opt_matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &Option<RMatrix>, s: S) -> Result<S::Ok, S::Error> {
        m.as_ref().map(matrix_to_value).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<RMatrix>, D::Error> {
        let v = Option::<Value>::deserialize(d)?;
        v.as_ref()
            .map(matrix_from_value)
            .transpose()
            .map_err(D::Error::custom)
    }
}

pub mod integer_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Integer], s: S) -> Result<S::Ok, S::Error> {
        integers_to_value(v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Integer>, D::Error> {
        let v = Vec::<Value>::deserialize(d)?;
        v.iter()
            .map(|x| match x {
                Value::Number(n) => n
                    .as_i64()
                    .map(Integer::from)
                    .ok_or_else(|| format!("not an integer: {n}")),
                Value::String(s) => s.trim().parse().map_err(|_| format!("not an integer: {s}")),
                other => Err(format!("not an integer: {other}")),
            })
            .collect::<Result<_, _>>()
            .map_err(D::Error::custom)
    }
}

pub mod opt_integer_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<Vec<Integer>>, s: S) -> Result<S::Ok, S::Error> {
        v.as_deref().map(integers_to_value).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<Integer>>, D::Error> {
        #[derive(Deserialize)]
        struct Wrap(#[serde(with = "super::integer_vec")] Vec<Integer>);
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}
