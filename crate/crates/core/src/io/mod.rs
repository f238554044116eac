//! File formats: expansions, value lists, fit models and the `meta` block.

pub mod literal;

use std::sync::Arc;

use rug::Rational;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::exactnum::{BigComplex, Coeff, NfElem, NumberField};
use crate::series::{ExpansionTerm, NilssonExpansion, TruncatedSeries, DEFAULT_PRECISION};
use literal::*;

pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::from_json(&e))
}

pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// `meta` block attached to every JSON output.
pub fn meta(extra: &[(&str, Value)]) -> Value {
    let mut m = Map::new();
    m.insert("tool".into(), json!("nilsson"));
    m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    for (k, v) in extra {
        m.insert((*k).into(), v.clone());
    }
    Value::Object(m)
}

fn field_of(c: &Coeff) -> Option<&Arc<NumberField>> {
    c.as_exact().map(|x| x.field()).filter(|k| k.degree() > 1)
}

/// The single non-rational field used by a set of coefficients, if any.
pub fn common_field<'a>(
    coeffs: impl IntoIterator<Item = &'a Coeff>,
) -> Result<Option<Arc<NumberField>>> {
    let mut found: Option<Arc<NumberField>> = None;
    for c in coeffs {
        if let Some(k) = field_of(c) {
            match &found {
                Some(f) if **f != **k => {
                    return Err(Error::FieldMismatch(
                        "values from two different number fields in one file".into(),
                    ))
                }
                Some(_) => {}
                None => found = Some(k.clone()),
            }
        }
    }
    Ok(found)
}

fn get<'a>(map: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    map.get(key)
        .ok_or_else(|| Error::InvalidInput(format!("missing field {key:?}")))
}

fn as_object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| Error::InvalidInput(format!("{what} must be a JSON object")))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::InvalidInput(format!("{what} must be an array")))
}

fn as_u64(v: &Value, what: &str) -> Result<u64> {
    v.as_u64()
        .ok_or_else(|| Error::InvalidInput(format!("{what} must be a nonnegative integer")))
}

pub fn expansion_to_value(e: &NilssonExpansion, meta_block: Value) -> Result<Value> {
    let all: Vec<&Coeff> = e
        .lambdas()
        .iter()
        .chain(e.terms().iter().flat_map(|t| {
            std::iter::once(&t.stokes).chain(t.g.coeffs().iter())
        }))
        .collect();
    let field = common_field(all)?;
    let mut m = Map::new();
    if let Some(k) = &field {
        m.insert("minpoly".into(), minpoly_to_value(k));
    }
    m.insert("embedding".into(), json!(e.embedding()));
    let r = e.r()?;
    m.insert("r_hint".into(), json!(r.to_f64()));
    m.insert(
        "lambdas".into(),
        Value::Array(
            e.lambdas()
                .iter()
                .map(|l| match l {
                    Coeff::Exact(x) if x.field().degree() > 1 => nf_literal(x),
                    other => coeff_to_value(other),
                })
                .collect(),
        ),
    );
    let terms: Vec<Value> = e
        .terms()
        .iter()
        .map(|t| {
            json!({
                "lambda_index": t.lambda_index,
                "alpha": rational_to_string(&t.alpha),
                "beta": t.beta,
                "stokes": coeff_to_value(&t.stokes),
                "g": t.g.coeffs().iter().map(coeff_to_value).collect::<Vec<_>>(),
            })
        })
        .collect();
    m.insert("terms".into(), Value::Array(terms));
    m.insert("d".into(), json!(e.d()));
    m.insert(
        "S".into(),
        Value::Array(e.base().iter().map(|s| json!(rational_to_string(s))).collect()),
    );
    m.insert("meta".into(), meta_block);
    Ok(Value::Object(m))
}

pub fn expansion_from_value(v: &Value) -> Result<NilssonExpansion> {
    let map = as_object(v, "expansion")?;
    let field = match map.get("minpoly") {
        Some(mp) => Some(minpoly_from_value(mp)?),
        None => None,
    };
    let prec = map
        .get("meta")
        .and_then(|m| m.get("precision"))
        .and_then(Value::as_u64)
        .map(|p| p as u32)
        .unwrap_or(DEFAULT_PRECISION);
    let lambdas = as_array(get(map, "lambdas")?, "lambdas")?
        .iter()
        .map(|l| coeff_from_value(l, field.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    let embedding = match map.get("embedding") {
        Some(x) => as_u64(x, "embedding")? as usize,
        None => field.as_ref().map_or(0, |k| k.default_embedding()),
    };
    if let Some(k) = &field {
        if embedding >= k.degree() {
            return Err(Error::InvalidInput(format!(
                "embedding {embedding} out of range for a degree-{} field",
                k.degree()
            )));
        }
    }
    let mut terms = Vec::new();
    for t in as_array(get(map, "terms")?, "terms")? {
        let tm = as_object(t, "term")?;
        let g = as_array(get(tm, "g")?, "g")?
            .iter()
            .map(|c| coeff_from_value(c, field.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        let beta = as_u64(get(tm, "beta")?, "beta")?;
        terms.push(ExpansionTerm {
            lambda_index: as_u64(get(tm, "lambda_index")?, "lambda_index")? as usize,
            alpha: rational_from_value(get(tm, "alpha")?)?,
            beta: u32::try_from(beta)
                .map_err(|_| Error::InvalidInput("beta out of range".into()))?,
            stokes: match tm.get("stokes") {
                Some(s) => coeff_from_value(s, field.as_ref())?,
                None => Coeff::rational(Rational::from(1)),
            },
            g: TruncatedSeries::normalized(g)?,
        });
    }
    match (map.get("d"), map.get("S")) {
        (Some(d), Some(s)) => {
            let d = as_u64(d, "d")? as u32;
            let base = as_array(s, "S")?
                .iter()
                .map(rational_from_value)
                .collect::<Result<Vec<_>>>()?;
            NilssonExpansion::with_omega(lambdas, terms, d, base, embedding, prec)
        }
        _ => NilssonExpansion::new(lambdas, terms, embedding, prec),
    }
}

/// Sequence values: exact strings / field literals, or complex triples.
#[derive(Clone, Debug)]
pub enum Values {
    Exact(Vec<NfElem>),
    Numeric(Vec<BigComplex>),
}

impl Values {
    pub fn len(&self) -> usize {
        match self {
            Values::Exact(v) => v.len(),
            Values::Numeric(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn values_to_value(n_min: u64, values: &Values, meta_block: Value) -> Result<Value> {
    let mut m = Map::new();
    m.insert("n_min".into(), json!(n_min));
    match values {
        Values::Exact(v) => {
            let coeffs: Vec<Coeff> = v.iter().cloned().map(Coeff::Exact).collect();
            if let Some(k) = common_field(&coeffs)? {
                m.insert("minpoly".into(), minpoly_to_value(&k));
            }
            m.insert("values".into(), Value::Array(v.iter().map(exact_to_value).collect()));
        }
        Values::Numeric(v) => {
            m.insert(
                "values".into(),
                Value::Array(v.iter().map(complex_to_value).collect()),
            );
        }
    }
    m.insert("meta".into(), meta_block);
    Ok(Value::Object(m))
}

pub fn values_from_value(v: &Value) -> Result<(u64, Values)> {
    let map = as_object(v, "values file")?;
    let n_min = match map.get("n_min") {
        Some(x) => as_u64(x, "n_min")?,
        None => 0,
    };
    let field = match map.get("minpoly") {
        Some(mp) => Some(minpoly_from_value(mp)?),
        None => None,
    };
    let items = as_array(get(map, "values")?, "values")?;
    let coeffs = items
        .iter()
        .map(|x| coeff_from_value(x, field.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    if coeffs.iter().all(Coeff::is_exact) {
        let exact = coeffs
            .into_iter()
            .map(|c| match c {
                Coeff::Exact(x) => x,
                Coeff::Numeric(_) => unreachable!(),
            })
            .collect();
        Ok((n_min, Values::Exact(exact)))
    } else {
        let prec = coeffs
            .iter()
            .filter_map(|c| match c {
                Coeff::Numeric(z) => Some(z.prec()),
                _ => None,
            })
            .min()
            .unwrap_or(DEFAULT_PRECISION);
        let num = coeffs
            .iter()
            .map(|c| c.to_complex(0, prec))
            .collect::<Result<Vec<_>>>()?;
        Ok((n_min, Values::Numeric(num)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
      "minpoly": [2, 0, 1],
      "lambdas": [
        {"minpoly": [2,0,1], "coords": [["329","729"],["-460","729"]]},
        {"minpoly": [2,0,1], "coords": [["329","729"],["460","729"]]}
      ],
      "terms": [
        {"lambda_index": 0, "alpha": "3/2", "beta": 0, "stokes": "1",
         "g": ["1", ["-3/4", "31/576"]]},
        {"lambda_index": 1, "alpha": "3/2", "beta": 0, "stokes": {"re": "0.5", "im": "-1", "prec": 128},
         "g": ["1", ["-3/4", "-31/576"]]}
      ],
      "d": 0, "S": ["3/2"]
    }"#;

    #[test]
    fn expansion_file_roundtrip() {
        let e = expansion_from_value(&parse_json(SAMPLE).unwrap()).unwrap();
        assert_eq!(e.lambdas().len(), 2);
        assert_eq!(e.embedding(), 1);
        let out = expansion_to_value(&e, meta(&[])).unwrap();
        let back = expansion_from_value(&out).unwrap();
        assert!(crate::series::expansion_canonical_equal(&e, &back, 1e-30));
        assert_eq!(to_pretty(&out), to_pretty(&expansion_to_value(&back, meta(&[])).unwrap()));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_json("{\n  \"a\": ,\n}") {
            Err(Error::Syntax { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn values_roundtrip() {
        let v = parse_json(r#"{"n_min": 3, "values": ["1", "-11/2", 4]}"#).unwrap();
        let (n0, vals) = values_from_value(&v).unwrap();
        assert_eq!(n0, 3);
        assert_eq!(vals.len(), 3);
        let out = values_to_value(n0, &vals, meta(&[])).unwrap();
        assert_eq!(out["values"][1], json!("-11/2"));
    }
}
