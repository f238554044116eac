//! JSON encodings of exact and numeric scalars.

use std::sync::Arc;

use rug::{Float, Integer, Rational};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactnum::{parse_rational, prec_digits, BigComplex, Coeff, NfElem, NumberField};

pub fn rational_to_string(r: &Rational) -> String {
    r.to_string()
}

pub fn rational_from_value(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rational::from(i))
            } else if let Some(u) = n.as_u64() {
                Ok(Rational::from(u))
            } else {
                Err(Error::InvalidInput(format!(
                    "non-integer number {n} where an exact rational was expected; quote it as \"p/q\""
                )))
            }
        }
        other => Err(Error::InvalidInput(format!(
            "expected a rational literal, got {other}"
        ))),
    }
}

pub fn integer_from_value(v: &Value) -> Result<Integer> {
    let r = rational_from_value(v)?;
    if *r.denom() != 1 {
        return Err(Error::InvalidInput(format!("expected an integer, got {r}")));
    }
    Ok(r.into_numer_denom().0)
}

pub fn minpoly_from_value(v: &Value) -> Result<Arc<NumberField>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::InvalidInput("minpoly must be an array of integers".into()))?;
    let coeffs = arr.iter().map(integer_from_value).collect::<Result<Vec<_>>>()?;
    NumberField::new(coeffs)
}

pub fn minpoly_to_value(k: &NumberField) -> Value {
    Value::Array(
        k.minpoly()
            .iter()
            .map(|c| match c.to_i64() {
                Some(i) => json!(i),
                None => json!(c.to_string()),
            })
            .collect(),
    )
}

fn coord_from_value(v: &Value) -> Result<Rational> {
    match v {
        Value::Array(pair) if pair.len() == 2 => {
            let n = integer_from_value(&pair[0])?;
            let d = integer_from_value(&pair[1])?;
            if d == 0 {
                return Err(Error::InvalidInput("zero denominator in coordinate".into()));
            }
            Ok(Rational::from((n, d)))
        }
        other => rational_from_value(other),
    }
}

/// Exact value: `"p/q"`, a coordinate array in the ambient field, or a
/// self-describing `{"minpoly": [...], "coords": [[num, den], ...]}`.
pub fn exact_from_value(v: &Value, field: Option<&Arc<NumberField>>) -> Result<NfElem> {
    match v {
        Value::Object(map) if map.contains_key("coords") => {
            let k = match map.get("minpoly") {
                Some(m) => minpoly_from_value(m)?,
                None => field.cloned().ok_or_else(|| {
                    Error::InvalidInput("number-field literal without a minpoly".into())
                })?,
            };
            if let Some(f) = field {
                if **f != *k {
                    return Err(Error::FieldMismatch(
                        "literal's minpoly differs from the file's minpoly".into(),
                    ));
                }
            }
            let coords = map["coords"]
                .as_array()
                .ok_or_else(|| Error::InvalidInput("coords must be an array".into()))?
                .iter()
                .map(coord_from_value)
                .collect::<Result<Vec<_>>>()?;
            NfElem::new(k, coords)
        }
        Value::Array(items) => {
            let k = field.ok_or_else(|| {
                Error::InvalidInput("coordinate array given but no minpoly is declared".into())
            })?;
            let coords = items.iter().map(coord_from_value).collect::<Result<Vec<_>>>()?;
            NfElem::new(k.clone(), coords)
        }
        other => {
            let r = rational_from_value(other)?;
            Ok(match field {
                Some(k) => NfElem::from_rational(k, r),
                None => NfElem::rational(r),
            })
        }
    }
}

/// Inverse of [`exact_from_value`] for a file whose minpoly is declared
/// at top level: rationals become strings, field elements coordinate arrays.
pub fn exact_to_value(x: &NfElem) -> Value {
    if let Some(r) = x.as_rational() {
        return json!(rational_to_string(r));
    }
    Value::Array(x.coords().iter().map(|c| json!(rational_to_string(c))).collect())
}

/// The stand-alone form `{"minpoly", "coords": [[num, den], ...]}`.
pub fn nf_literal(x: &NfElem) -> Value {
    json!({
        "minpoly": minpoly_to_value(x.field()),
        "coords": x.coords().iter()
            .map(|c| json!([c.numer().to_string(), c.denom().to_string()]))
            .collect::<Vec<_>>(),
    })
}

pub fn float_from_value(v: &Value, prec: u32) -> Result<Float> {
    match v {
        Value::String(s) => {
            let parsed = Float::parse(s.trim())
                .map_err(|e| Error::InvalidInput(format!("bad float literal {s:?}: {e}")))?;
            Ok(Float::with_val(prec, parsed))
        }
        Value::Number(n) => Ok(Float::with_val(prec, n.as_f64().unwrap_or(f64::NAN))),
        other => Err(Error::InvalidInput(format!("expected a float, got {other}"))),
    }
}

pub fn complex_from_value(v: &Value) -> Result<BigComplex> {
    let map = v
        .as_object()
        .ok_or_else(|| Error::InvalidInput("complex literal must be {re, im, prec}".into()))?;
    let prec = match map.get("prec") {
        Some(p) => p
            .as_u64()
            .filter(|p| (53..=1 << 20).contains(p))
            .ok_or_else(|| Error::InvalidInput("prec must be an integer in 53..2^20".into()))?
            as u32,
        None => 256,
    };
    let re = match map.get("re") {
        Some(x) => float_from_value(x, prec)?,
        None => Float::new(prec),
    };
    let im = match map.get("im") {
        Some(x) => float_from_value(x, prec)?,
        None => Float::new(prec),
    };
    Ok(BigComplex::new(re, im))
}

pub fn complex_to_value(z: &BigComplex) -> Value {
    let digits = prec_digits(z.prec()) + 2;
    let (re, im) = z.to_decimal(digits);
    json!({"re": re, "im": im, "prec": z.prec()})
}

pub fn coeff_from_value(v: &Value, field: Option<&Arc<NumberField>>) -> Result<Coeff> {
    match v {
        Value::Object(map) if map.contains_key("re") || map.contains_key("im") => {
            Ok(Coeff::Numeric(complex_from_value(v)?))
        }
        _ => Ok(Coeff::Exact(exact_from_value(v, field)?)),
    }
}

pub fn coeff_to_value(c: &Coeff) -> Value {
    match c {
        Coeff::Exact(x) => exact_to_value(x),
        Coeff::Numeric(z) => complex_to_value(z),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_field_literal_roundtrip() {
        let v: Value =
            serde_json::from_str(r#"{"minpoly": [2,0,1], "coords": [["329","729"],["-460","729"]]}"#)
                .unwrap();
        let x = exact_from_value(&v, None).unwrap();
        assert_eq!(x.coords()[1], Rational::from((-460, 729)));
        assert_eq!(x.modulus_squared_exact().unwrap(), 1);
        let back = exact_from_value(&nf_literal(&x), None).unwrap();
        assert_eq!(back, x);
        let arr = exact_to_value(&x);
        assert_eq!(exact_from_value(&arr, Some(x.field())).unwrap(), x);
        assert!(exact_from_value(&arr, None).is_err());
    }

    #[test]
    fn rationals_and_complex() {
        let r = exact_from_value(&json!("-3/6"), None).unwrap();
        assert_eq!(r.as_rational().unwrap(), &Rational::from((-1, 2)));
        assert_eq!(exact_from_value(&json!(7), None).unwrap().coords()[0], 7);
        assert!(exact_from_value(&json!(0.5), None).is_err());
        let z = BigComplex::from_f64(0.25, -1.5, 128);
        let back = complex_from_value(&complex_to_value(&z)).unwrap();
        assert_eq!(back, z);
        assert!(matches!(
            coeff_from_value(&json!({"re": "1", "im": "0"}), None).unwrap(),
            Coeff::Numeric(_)
        ));
    }
}
