//! Linear recurrences `Σ_{i≤L} p_i(n) a_{n+i} = 0` with polynomial
//! coefficients: file format, exact unrolling, characteristic data and
//! formal Nilsson solutions.

mod formal;

use std::sync::Arc;

use rug::{Integer, Rational};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::exactnum::poly::{self, RatPoly};
use crate::exactnum::{NfElem, NumberField};
use crate::io::literal::{
    exact_from_value, exact_to_value, minpoly_from_value, minpoly_to_value, rational_from_value,
    rational_to_string,
};
use crate::io::parse_json;

pub use formal::{
    formal_expansion, formal_solutions, residual_check, FormalSolution, DEFAULT_ORDER,
};

#[derive(Clone, Debug, PartialEq)]
pub struct Recurrence {
    coeffs: Vec<RatPoly>,
    initial: Option<Vec<NfElem>>,
    field: Option<Arc<NumberField>>,
}

impl Recurrence {
    /// `coeffs[i]` is `p_i` in ascending powers of `n`.
    pub fn new(coeffs: Vec<RatPoly>, initial: Option<Vec<NfElem>>) -> Result<Self> {
        let coeffs: Vec<RatPoly> = coeffs.into_iter().map(poly::trimmed).collect();
        if coeffs.len() < 2 {
            return Err(Error::InvalidInput(
                "a recurrence needs at least two coefficient polynomials (order >= 1)".into(),
            ));
        }
        if coeffs.last().unwrap().is_empty() {
            return Err(Error::InvalidInput(
                "leading polynomial p_L is identically zero".into(),
            ));
        }
        let order = coeffs.len() - 1;
        let mut field = None;
        if let Some(init) = &initial {
            if init.len() != order {
                return Err(Error::InvalidInput(format!(
                    "order {order} recurrence needs {order} initial values, got {}",
                    init.len()
                )));
            }
            field = crate::io::common_field(
                init.iter().cloned().map(crate::exactnum::Coeff::Exact).collect::<Vec<_>>().iter(),
            )?;
        }
        let initial = initial.map(|v| {
            v.into_iter()
                .map(|x| match (&field, x.field().degree()) {
                    (Some(k), 1) => NfElem::from_rational(k, x.coords()[0].clone()),
                    _ => x,
                })
                .collect()
        });
        Ok(Recurrence {
            coeffs,
            initial,
            field,
        })
    }

    pub fn from_ints(coeffs: &[&[i64]], initial: Option<&[i64]>) -> Result<Self> {
        Recurrence::new(
            coeffs.iter().map(|c| poly::from_ints(c)).collect(),
            initial.map(|v| v.iter().map(|&x| NfElem::rational(Rational::from(x))).collect()),
        )
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[RatPoly] {
        &self.coeffs
    }

    pub fn initial(&self) -> Option<&[NfElem]> {
        self.initial.as_deref()
    }

    pub fn with_initial(&self, initial: Vec<NfElem>) -> Result<Self> {
        Recurrence::new(self.coeffs.clone(), Some(initial))
    }

    /// `D = max deg p_i`.
    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .filter_map(|p| poly::degree(p))
            .max()
            .unwrap_or(0)
    }
}

pub fn parse_recurrence(text: &str) -> Result<Recurrence> {
    recurrence_from_value(&parse_json(text)?)
}

pub fn recurrence_from_value(v: &Value) -> Result<Recurrence> {
    let map = v
        .as_object()
        .ok_or_else(|| Error::InvalidInput("recurrence file must be a JSON object".into()))?;
    let field = match map.get("minpoly") {
        Some(m) => Some(minpoly_from_value(m)?),
        None => None,
    };
    let rows = map
        .get("coeffs")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::InvalidInput("missing array field \"coeffs\"".into()))?;
    let coeffs = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.as_array()
                .ok_or_else(|| Error::InvalidInput(format!("coeffs[{i}] must be an array")))?
                .iter()
                .map(rational_from_value)
                .collect::<Result<RatPoly>>()
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(order) = map.get("order") {
        let order = order
            .as_u64()
            .ok_or_else(|| Error::InvalidInput("order must be a positive integer".into()))?;
        if order as usize + 1 != coeffs.len() {
            return Err(Error::InvalidInput(format!(
                "order {order} but {} coefficient polynomials",
                coeffs.len()
            )));
        }
    }
    let initial = match map.get("initial") {
        Some(Value::Null) | None => None,
        Some(v) => Some(
            v.as_array()
                .ok_or_else(|| Error::InvalidInput("initial must be an array".into()))?
                .iter()
                .map(|x| exact_from_value(x, field.as_ref()))
                .collect::<Result<Vec<_>>>()?,
        ),
    };
    let mut rec = Recurrence::new(coeffs, initial)?;
    if rec.field.is_none() {
        rec.field = field;
    }
    Ok(rec)
}

pub fn recurrence_to_value(rec: &Recurrence) -> Value {
    let mut m = Map::new();
    m.insert("order".into(), json!(rec.order()));
    m.insert(
        "coeffs".into(),
        Value::Array(
            rec.coeffs
                .iter()
                .map(|p| {
                    let p: Vec<Value> = if p.is_empty() {
                        vec![json!("0")]
                    } else {
                        p.iter().map(|c| json!(rational_to_string(c))).collect()
                    };
                    Value::Array(p)
                })
                .collect(),
        ),
    );
    if let Some(init) = &rec.initial {
        m.insert("initial".into(), Value::Array(init.iter().map(exact_to_value).collect()));
    }
    if let Some(k) = &rec.field {
        m.insert("minpoly".into(), minpoly_to_value(k));
    }
    Value::Object(m)
}

pub fn serialize_recurrence(rec: &Recurrence) -> String {
    crate::io::to_pretty(&recurrence_to_value(rec))
}

/// Recurrences shipped with the crate: `tet6j`, `apery`, `geometric`.
pub fn builtin(name: &str) -> Result<Recurrence> {
    let text = match name {
        "tet6j" => include_str!("../../data/tet6j.rec.json"),
        "apery" => include_str!("../../data/apery.rec.json"),
        "geometric" => include_str!("../../data/geometric.rec.json"),
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown built-in recurrence {other:?} (known: tet6j, apery, geometric)"
            )))
        }
    };
    parse_recurrence(text)
}

/// Exact values `a_0..a_N`.
pub fn unroll(rec: &Recurrence, n_max: u64) -> Result<Vec<NfElem>> {
    let init = rec.initial.as_ref().ok_or_else(|| {
        Error::Precondition("unrolling needs initial values".into())
    })?;
    let l = rec.order();
    let mut out: Vec<NfElem> = init.iter().take(n_max as usize + 1).cloned().collect();
    let mut n: u64 = 0;
    while (out.len() as u64) <= n_max {
        let nq = Rational::from(Integer::from(n));
        let lead = poly::eval(&rec.coeffs[l], &nq);
        if lead == 0 {
            return Err(Error::SingularLeading { n });
        }
        let base = n as usize;
        let mut acc = out[base].scale(&poly::eval(&rec.coeffs[0], &nq));
        for i in 1..l {
            let c = poly::eval(&rec.coeffs[i], &nq);
            if c != 0 {
                acc = &acc + &out[base + i].scale(&c);
            }
        }
        let factor = Rational::from(-lead.recip());
        out.push(acc.scale(&factor));
        n += 1;
    }
    Ok(out)
}

/// `χ(x) = Σ_i [n^D] p_i · x^i`.
pub fn characteristic_polynomial(rec: &Recurrence) -> RatPoly {
    let d = rec.degree();
    poly::trimmed(
        rec.coeffs
            .iter()
            .map(|p| p.get(d).cloned().unwrap_or_default())
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn apery() -> Recurrence {
        Recurrence::from_ints(
            &[&[1, 3, 3, 1], &[-117, -231, -153, -34], &[8, 12, 6, 1]],
            Some(&[1, 5]),
        )
        .unwrap()
    }

    #[test]
    fn constant_coefficients() {
        let rec = Recurrence::from_ints(&[&[6], &[-5], &[1]], Some(&[2, 5])).unwrap();
        assert_eq!(rec.order(), 2);
        let v = unroll(&rec, 5).unwrap();
        assert_eq!(v[5].as_rational().unwrap(), &Rational::from(275));
        assert_eq!(characteristic_polynomial(&rec), poly::from_ints(&[6, -5, 1]));
    }

    #[test]
    fn fibonacci() {
        let rec = Recurrence::from_ints(&[&[-1], &[-1], &[1]], Some(&[0, 1])).unwrap();
        assert_eq!(unroll(&rec, 10).unwrap()[10].as_rational().unwrap(), &55);
    }

    #[test]
    fn apery_values_and_characteristic() {
        let rec = apery();
        let v = unroll(&rec, 4).unwrap();
        let want = [1, 5, 73, 1445, 33001];
        for (x, w) in v.iter().zip(want) {
            assert_eq!(x.as_rational().unwrap(), &Rational::from(w));
        }
        assert_eq!(characteristic_polynomial(&rec), poly::from_ints(&[1, -34, 1]));
    }

    #[test]
    fn missing_leading_term_gives_zero_constant() {
        let rec = Recurrence::from_ints(&[&[1], &[0, 1], &[0, 2]], None).unwrap();
        assert_eq!(characteristic_polynomial(&rec)[0], 0);
    }

    #[test]
    fn parse_and_serialize() {
        let text = r#"{"coeffs": [[6],[-5],[1]], "initial": ["2","5"]}"#;
        let rec = parse_recurrence(text).unwrap();
        assert_eq!(rec.order(), 2);
        let s = serialize_recurrence(&rec);
        assert_eq!(serialize_recurrence(&parse_recurrence(&s).unwrap()), s);
        let apery = r#"{"coeffs": [[1,3,3,1],[-117,-231,-153,-34],[8,12,6,1]]}"#;
        assert_eq!(parse_recurrence(apery).unwrap().order(), 2);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_recurrence("{\"coeffs\": [[1],"),
            Err(Error::Syntax { .. })
        ));
        assert!(parse_recurrence(r#"{"coeffs": [[1],[0]]}"#).is_err());
        assert!(parse_recurrence(r#"{"coeffs": [[1],[1]], "initial": ["1","2"]}"#).is_err());
        assert!(parse_recurrence(r#"{"order": 3, "coeffs": [[1],[1]]}"#).is_err());
    }

    #[test]
    fn singular_leading_coefficient_reports_n() {
        // (n-2) a_{n+1} = a_n
        let rec = Recurrence::from_ints(&[&[-1], &[-2, 1]], Some(&[1])).unwrap();
        match unroll(&rec, 5) {
            Err(Error::SingularLeading { n }) => assert_eq!(n, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(unroll(&Recurrence::from_ints(&[&[1], &[1]], None).unwrap(), 3).is_err());
    }
}
