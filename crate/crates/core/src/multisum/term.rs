use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use rug::{Integer, Rational};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::exactnum::{Coeff, NfElem, NumberField};
use crate::io::literal::{exact_from_value, exact_to_value, minpoly_from_value, minpoly_to_value};

/// Hard cap on the number of lattice points visited per `n`.
pub const SUPPORT_CAP: u64 = 10_000_000;

/// `A(n, k) = a·n + Σ b_i k_i + c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearForm {
    pub n: i64,
    pub k: Vec<i64>,
    pub constant: i64,
}

impl LinearForm {
    pub fn new(n: i64, k: Vec<i64>, constant: i64) -> Self {
        LinearForm { n, k, constant }
    }

    pub fn zero(r: usize) -> Self {
        LinearForm::new(0, vec![0; r], 0)
    }

    pub fn eval(&self, n: i64, k: &[i64]) -> i64 {
        self.n * n + self.k.iter().zip(k).map(|(a, b)| a * b).sum::<i64>() + self.constant
    }

    pub fn is_zero(&self) -> bool {
        self.n == 0 && self.constant == 0 && self.k.iter().all(|&c| c == 0)
    }

    fn add_scaled(&mut self, other: &LinearForm, s: i64) {
        self.n += s * other.n;
        self.constant += s * other.constant;
        for (a, b) in self.k.iter_mut().zip(&other.k) {
            *a += s * b;
        }
    }

    fn to_value(&self) -> Value {
        json!({"n": self.n, "k": self.k, "const": self.constant})
    }

    fn from_value(v: &Value, r: usize) -> Result<Self> {
        let m = v
            .as_object()
            .ok_or_else(|| Error::InvalidInput("form must be {n, k, const}".into()))?;
        let int = |key: &str| -> Result<i64> {
            match m.get(key) {
                None => Ok(0),
                Some(x) => x
                    .as_i64()
                    .ok_or_else(|| Error::InvalidInput(format!("form.{key} must be an integer"))),
            }
        };
        let k = match m.get("k") {
            None => vec![0; r],
            Some(x) => x
                .as_array()
                .ok_or_else(|| Error::InvalidInput("form.k must be an array".into()))?
                .iter()
                .map(|c| {
                    c.as_i64()
                        .ok_or_else(|| Error::InvalidInput("form.k entries must be integers".into()))
                })
                .collect::<Result<Vec<_>>>()?,
        };
        if k.len() != r {
            return Err(Error::InvalidInput(format!(
                "form has {} k-coefficients but the term has r = {r}",
                k.len()
            )));
        }
        Ok(LinearForm::new(int("n")?, k, int("const")?))
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        let mut push = |c: i64, name: String| {
            if c != 0 {
                parts.push(match c {
                    1 => name,
                    -1 => format!("-{name}"),
                    _ => format!("{c}{name}"),
                });
            }
        };
        push(self.n, "n".into());
        for (i, &c) in self.k.iter().enumerate() {
            push(c, format!("k{}", i + 1));
        }
        if self.constant != 0 {
            parts.push(self.constant.to_string());
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", parts.join(" + ").replace("+ -", "- "))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    pub form: LinearForm,
    /// `+1` for a factorial in the numerator, `-1` in the denominator.
    pub eps: i32,
}

/// `C_0^n ∏ C_i^{k_i} · (-1)^{s(n,k)} · ∏ P_m(n,k)^{e_m} · ∏ A_j(n,k)!^{ε_j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct BalancedTerm {
    pub r: usize,
    pub c0: NfElem,
    pub c: Vec<NfElem>,
    pub factors: Vec<Factor>,
    pub sign_form: Option<LinearForm>,
    pub prefactors: Vec<(LinearForm, i32)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BalanceReport {
    pub balanced: bool,
    /// `Σ ε_j A_j`; zero iff balanced.
    pub defect: LinearForm,
    /// Whether some factorial form has a constant offset.
    pub uses_offsets: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SupportSet {
    pub n: u64,
    pub points: Vec<Vec<i64>>,
}

fn form(n: i64, k: &[i64], c: i64) -> LinearForm {
    LinearForm::new(n, k.to_vec(), c)
}

fn repeat(f: LinearForm, eps: i32, times: usize) -> impl Iterator<Item = Factor> {
    std::iter::repeat(Factor { form: f, eps }).take(times)
}

fn one() -> NfElem {
    NfElem::rational(Rational::from(1))
}

impl BalancedTerm {
    pub fn new(
        c0: NfElem,
        c: Vec<NfElem>,
        factors: Vec<Factor>,
        sign_form: Option<LinearForm>,
        prefactors: Vec<(LinearForm, i32)>,
    ) -> Result<Self> {
        let r = c.len();
        let forms = factors
            .iter()
            .map(|f| &f.form)
            .chain(sign_form.iter())
            .chain(prefactors.iter().map(|p| &p.0));
        for f in forms {
            if f.k.len() != r {
                return Err(Error::InvalidInput(format!(
                    "form {f} does not have r = {r} summation variables"
                )));
            }
        }
        if factors.iter().any(|f| f.eps != 1 && f.eps != -1) {
            return Err(Error::InvalidInput("factorial signs must be +1 or -1".into()));
        }
        let field = crate::io::common_field(
            std::iter::once(&c0)
                .chain(&c)
                .cloned()
                .map(Coeff::Exact)
                .collect::<Vec<_>>()
                .iter(),
        )?;
        let lift = |x: NfElem| match (&field, x.field().degree()) {
            (Some(k), 1) => NfElem::from_rational(k, x.coords()[0].clone()),
            _ => x,
        };
        Ok(BalancedTerm {
            r,
            c0: lift(c0),
            c: c.into_iter().map(lift).collect(),
            factors,
            sign_form,
            prefactors,
        })
    }

    /// `Σ_{k,l} C(n,k+l)² C(n+k,k)³ C(n+l,l)` in factorial form.
    pub fn apery_like() -> Self {
        let factors = repeat(form(1, &[1, 0], 0), 1, 3)
            .chain(repeat(form(1, &[0, 1], 0), 1, 1))
            .chain(repeat(form(0, &[1, 0], 0), -1, 3))
            .chain(repeat(form(0, &[0, 1], 0), -1, 1))
            .chain(repeat(form(1, &[0, 0], 0), -1, 2))
            .chain(repeat(form(0, &[1, 1], 0), -1, 2))
            .chain(repeat(form(1, &[-1, -1], 0), -1, 2))
            .collect();
        BalancedTerm::new(one(), vec![one(), one()], factors, None, vec![])
            .expect("built-in term is well formed")
    }

    /// The tetrahedral 6j summand
    /// `n!^6/(3n+1)!² · (-1)^k (k+1)! / ((k-3n)!^4 (4n-k)!^3)`, `3n ≤ k ≤ 4n`,
    /// written with `(3n+1)! = (3n+1)·(3n)!` and `(k+1)! = (k+1)·k!` so that
    /// every factorial form is free of offsets.
    pub fn tet6j() -> Self {
        let factors = repeat(form(1, &[0], 0), 1, 6)
            .chain(repeat(form(3, &[0], 0), -1, 2))
            .chain(repeat(form(0, &[1], 0), 1, 1))
            .chain(repeat(form(-3, &[1], 0), -1, 4))
            .chain(repeat(form(4, &[-1], 0), -1, 3))
            .collect();
        BalancedTerm::new(
            one(),
            vec![one()],
            factors,
            Some(form(0, &[1], 0)),
            vec![(form(0, &[1], 1), 1), (form(3, &[0], 1), -2)],
        )
        .expect("built-in term is well formed")
    }

    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "apery-like" => Ok(BalancedTerm::apery_like()),
            "tet6j" => Ok(BalancedTerm::tet6j()),
            other => Err(Error::InvalidInput(format!(
                "unknown built-in term {other:?} (known: apery-like, tet6j)"
            ))),
        }
    }

    fn field(&self) -> Option<&Arc<NumberField>> {
        std::iter::once(&self.c0)
            .chain(&self.c)
            .map(|x| x.field())
            .find(|k| k.degree() > 1)
    }

    pub fn to_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("r".into(), json!(self.r));
        if let Some(k) = self.field() {
            m.insert("minpoly".into(), minpoly_to_value(k));
        }
        m.insert("C0".into(), exact_to_value(&self.c0));
        m.insert("C".into(), Value::Array(self.c.iter().map(exact_to_value).collect()));
        m.insert(
            "factors".into(),
            Value::Array(
                self.factors
                    .iter()
                    .map(|f| json!({"form": f.form.to_value(), "eps": f.eps}))
                    .collect(),
            ),
        );
        if let Some(s) = &self.sign_form {
            m.insert("sign_form".into(), s.to_value());
        }
        if !self.prefactors.is_empty() {
            m.insert(
                "prefactors".into(),
                Value::Array(
                    self.prefactors
                        .iter()
                        .map(|(f, e)| json!({"form": f.to_value(), "exp": e}))
                        .collect(),
                ),
            );
        }
        Value::Object(m)
    }

    pub fn from_value(v: &Value) -> Result<Self> {
        let m = v
            .as_object()
            .ok_or_else(|| Error::InvalidInput("term file must be a JSON object".into()))?;
        let field = match m.get("minpoly") {
            Some(p) => Some(minpoly_from_value(p)?),
            None => None,
        };
        let c = match m.get("C") {
            Some(x) => x
                .as_array()
                .ok_or_else(|| Error::InvalidInput("C must be an array".into()))?
                .iter()
                .map(|x| exact_from_value(x, field.as_ref()))
                .collect::<Result<Vec<_>>>()?,
            None => Vec::new(),
        };
        let r = match m.get("r") {
            Some(x) => x
                .as_u64()
                .ok_or_else(|| Error::InvalidInput("r must be a natural number".into()))?
                as usize,
            None => c.len(),
        };
        let c = if c.is_empty() { vec![one(); r] } else { c };
        if c.len() != r {
            return Err(Error::InvalidInput(format!(
                "r = {r} but {} constants C_i are given",
                c.len()
            )));
        }
        let c0 = match m.get("C0") {
            Some(x) => exact_from_value(x, field.as_ref())?,
            None => one(),
        };
        let factors = m
            .get("factors")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::InvalidInput("missing array field \"factors\"".into()))?
            .iter()
            .map(|f| {
                let eps = f
                    .get("eps")
                    .and_then(Value::as_i64)
                    .ok_or_else(|| Error::InvalidInput("factor needs eps = ±1".into()))?;
                let form = LinearForm::from_value(
                    f.get("form")
                        .ok_or_else(|| Error::InvalidInput("factor needs a form".into()))?,
                    r,
                )?;
                Ok(Factor {
                    form,
                    eps: eps as i32,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let sign_form = match m.get("sign_form") {
            Some(Value::Null) | None => None,
            Some(s) => Some(LinearForm::from_value(s, r)?),
        };
        let prefactors = match m.get("prefactors") {
            Some(Value::Array(items)) => items
                .iter()
                .map(|p| {
                    let f = LinearForm::from_value(
                        p.get("form")
                            .ok_or_else(|| Error::InvalidInput("prefactor needs a form".into()))?,
                        r,
                    )?;
                    let e = match p.get("exp") {
                        None => 1,
                        Some(e) => e.as_i64().ok_or_else(|| {
                            Error::InvalidInput("prefactor exp must be an integer".into())
                        })? as i32,
                    };
                    Ok((f, e))
                })
                .collect::<Result<Vec<_>>>()?,
            Some(Value::Null) | None => Vec::new(),
            Some(_) => return Err(Error::InvalidInput("prefactors must be an array".into())),
        };
        BalancedTerm::new(c0, c, factors, sign_form, prefactors)
    }
}

pub fn check_balanced(t: &BalancedTerm) -> BalanceReport {
    let mut defect = LinearForm::zero(t.r);
    for f in &t.factors {
        defect.add_scaled(&f.form, f.eps as i64);
    }
    BalanceReport {
        balanced: defect.is_zero(),
        uses_offsets: t.factors.iter().any(|f| f.form.constant != 0),
        defect,
    }
}

/// Box bounds from interval propagation over the constraints `A_j ≥ 0`.
fn propagate(forms: &[&LinearForm], n: i64, r: usize) -> Option<Vec<(i64, i64)>> {
    let mut lo: Vec<Option<i64>> = vec![None; r];
    let mut hi: Vec<Option<i64>> = vec![None; r];
    for _ in 0..4 * r + 8 {
        let mut changed = false;
        for f in forms {
            // Σ a_i k_i ≥ -b
            let b = f.n * n + f.constant;
            for i in 0..r {
                let a = f.k[i];
                if a == 0 {
                    continue;
                }
                // max of Σ_{j≠i} a_j k_j
                let mut rest: Option<i64> = Some(0);
                for j in (0..r).filter(|&j| j != i) {
                    let aj = f.k[j];
                    let m = match aj.signum() {
                        0 => Some(0),
                        1 => hi[j].map(|h| aj * h),
                        _ => lo[j].map(|l| aj * l),
                    };
                    rest = rest.zip(m).map(|(x, y)| x + y);
                }
                let Some(rest) = rest else { continue };
                // a k_i ≥ -b - rest
                let rhs = -b - rest;
                if a > 0 {
                    let bound = div_ceil(rhs, a);
                    if lo[i].map_or(true, |l| bound > l) {
                        lo[i] = Some(bound);
                        changed = true;
                    }
                } else {
                    let bound = div_floor(rhs, a);
                    if hi[i].map_or(true, |h| bound < h) {
                        hi[i] = Some(bound);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    lo.into_iter()
        .zip(hi)
        .map(|(l, h)| l.zip(h))
        .collect()
}

fn div_floor(a: i64, b: i64) -> i64 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn div_ceil(a: i64, b: i64) -> i64 {
    -div_floor(-a, b)
}

pub fn enumerate_support(t: &BalancedTerm, n: u64) -> Result<SupportSet> {
    enumerate_support_capped(t, n, SUPPORT_CAP)
}

pub(crate) fn enumerate_support_capped(t: &BalancedTerm, n: u64, cap: u64) -> Result<SupportSet> {
    let ni = n as i64;
    let forms: Vec<&LinearForm> = t.factors.iter().map(|f| &f.form).collect();
    let feasible = |k: &[i64]| forms.iter().all(|f| f.eval(ni, k) >= 0);
    if t.r == 0 {
        let points = if feasible(&[]) { vec![vec![]] } else { vec![] };
        return Ok(SupportSet { n, points });
    }
    let mut points = Vec::new();
    if let Some(bounds) = propagate(&forms, ni, t.r) {
        if bounds.iter().any(|(l, h)| l > h) {
            return Ok(SupportSet { n, points });
        }
        let volume = bounds
            .iter()
            .map(|(l, h)| (h - l + 1) as f64)
            .product::<f64>();
        if volume <= cap as f64 {
            let mut k: Vec<i64> = bounds.iter().map(|b| b.0).collect();
            'outer: loop {
                if feasible(&k) {
                    points.push(k.clone());
                }
                let mut i = t.r;
                loop {
                    if i == 0 {
                        break 'outer;
                    }
                    i -= 1;
                    if k[i] < bounds[i].1 {
                        k[i] += 1;
                        break;
                    }
                    k[i] = bounds[i].0;
                }
            }
            return Ok(SupportSet { n, points });
        }
    }
    // bounded BFS from the origin
    let origin = vec![0i64; t.r];
    if !feasible(&origin) {
        return Err(Error::UnboundedSupport { cap });
    }
    let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut queue = VecDeque::from([origin.clone()]);
    seen.insert(origin);
    while let Some(k) = queue.pop_front() {
        if seen.len() as u64 > cap {
            return Err(Error::UnboundedSupport { cap });
        }
        for i in 0..t.r {
            for d in [-1, 1] {
                let mut nb = k.clone();
                nb[i] += d;
                if !seen.contains(&nb) && feasible(&nb) {
                    seen.insert(nb.clone());
                    queue.push_back(nb);
                }
            }
        }
    }
    Ok(SupportSet {
        n,
        points: seen.into_iter().collect(),
    })
}

struct FactorialTable(Vec<Integer>);

impl FactorialTable {
    fn new(max: usize) -> Self {
        let mut v = Vec::with_capacity(max + 1);
        v.push(Integer::from(1));
        for i in 1..=max {
            let next = Integer::from(&v[i - 1] * i as u64);
            v.push(next);
        }
        FactorialTable(v)
    }
}

/// Exact `a_n = Σ_{k ∈ supp} t_{n,k}`.
pub fn eval_multisum(t: &BalancedTerm, n: u64) -> Result<NfElem> {
    let support = enumerate_support(t, n)?;
    let ni = n as i64;
    let max = support
        .points
        .iter()
        .flat_map(|k| t.factors.iter().map(move |f| f.form.eval(ni, k)))
        .max()
        .unwrap_or(0);
    let table = FactorialTable::new(max.max(0) as usize);
    // collapse repeated factorial forms into exponents
    let mut grouped: BTreeMap<&LinearForm, i32> = BTreeMap::new();
    for f in &t.factors {
        *grouped.entry(&f.form).or_default() += f.eps;
    }
    let grouped: Vec<(&LinearForm, i32)> = grouped.into_iter().filter(|(_, e)| *e != 0).collect();
    let field = t.field().cloned();
    let c_trivial = t.c0.as_rational().is_some_and(|x| *x == 1)
        && t.c.iter().all(|x| x.as_rational().is_some_and(|x| *x == 1));
    let c0n = t.c0.pow(n);
    let mut exact_sum = Rational::new();
    let mut field_sum = field.as_ref().map(NfElem::zero);
    for k in &support.points {
        let mut num = Integer::from(1);
        let mut den = Integer::from(1);
        for (f, e) in &grouped {
            let v = f.eval(ni, k);
            if v < 0 {
                return Err(Error::Internal(format!(
                    "factorial of negative value {v} inside the support"
                )));
            }
            let fact = &table.0[v as usize];
            let target = if *e > 0 { &mut num } else { &mut den };
            for _ in 0..e.unsigned_abs() {
                *target *= fact;
            }
        }
        for (f, e) in &t.prefactors {
            let v = Integer::from(f.eval(ni, k));
            if v == 0 && *e < 0 {
                return Err(Error::DivisionByZero);
            }
            let target = if *e > 0 { &mut num } else { &mut den };
            for _ in 0..e.unsigned_abs() {
                *target *= &v;
            }
        }
        if let Some(s) = &t.sign_form {
            if s.eval(ni, k).rem_euclid(2) == 1 {
                num = -num;
            }
        }
        let term = Rational::from((num, den));
        if c_trivial {
            exact_sum += term;
        } else {
            let mut cpow = c0n.clone();
            for (ci, &ki) in t.c.iter().zip(k) {
                let p = if ki >= 0 {
                    ci.pow(ki as u64)
                } else {
                    ci.inverse()?.pow(ki.unsigned_abs())
                };
                cpow = cpow.checked_mul(&p)?;
            }
            let contrib = cpow.scale(&term);
            match &mut field_sum {
                Some(s) => *s = s.checked_add(&contrib)?,
                None => exact_sum += contrib.as_rational().cloned().unwrap_or_default(),
            }
        }
    }
    Ok(match (field, field_sum) {
        (Some(k), Some(s)) => s.checked_add(&NfElem::from_rational(&k, exact_sum))?,
        _ => NfElem::rational(exact_sum),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_are_balanced() {
        for t in [BalancedTerm::apery_like(), BalancedTerm::tet6j()] {
            let rep = check_balanced(&t);
            assert!(rep.balanced, "{}", rep.defect);
            assert!(!rep.uses_offsets);
        }
    }

    #[test]
    fn lone_factorial_is_unbalanced() {
        let t = BalancedTerm::new(
            one(),
            vec![],
            vec![Factor {
                form: form(1, &[], 0),
                eps: 1,
            }],
            None,
            vec![],
        )
        .unwrap();
        let rep = check_balanced(&t);
        assert!(!rep.balanced);
        assert_eq!(rep.defect, form(1, &[], 0));
        assert_eq!(rep.defect.to_string(), "n");
    }

    #[test]
    fn supports() {
        let a = BalancedTerm::apery_like();
        assert_eq!(enumerate_support(&a, 0).unwrap().points, vec![vec![0, 0]]);
        assert_eq!(
            enumerate_support(&a, 1).unwrap().points,
            vec![vec![0, 0], vec![0, 1], vec![1, 0]]
        );
        let t = BalancedTerm::tet6j();
        assert_eq!(
            enumerate_support(&t, 2).unwrap().points,
            vec![vec![6], vec![7], vec![8]]
        );
        for n in 0..15u64 {
            assert_eq!(
                enumerate_support(&a, n).unwrap().points.len() as u64,
                (n + 1) * (n + 2) / 2
            );
            assert_eq!(enumerate_support(&t, n).unwrap().points.len() as u64, n + 1);
        }
    }

    #[test]
    fn values() {
        let a = BalancedTerm::apery_like();
        assert_eq!(eval_multisum(&a, 0).unwrap().as_rational().unwrap(), &1);
        assert_eq!(eval_multisum(&a, 1).unwrap().as_rational().unwrap(), &11);
        let t = BalancedTerm::tet6j();
        assert_eq!(eval_multisum(&t, 0).unwrap().as_rational().unwrap(), &1);
        assert_eq!(
            eval_multisum(&t, 1).unwrap().as_rational().unwrap(),
            &Rational::from((1, 6))
        );
    }

    #[test]
    fn unbounded_support_is_reported() {
        // only k ≥ 0: infinite support
        let t = BalancedTerm::new(
            one(),
            vec![one()],
            vec![
                Factor { form: form(0, &[1], 0), eps: 1 },
                Factor { form: form(0, &[1], 0), eps: -1 },
            ],
            None,
            vec![],
        )
        .unwrap();
        assert!(matches!(
            enumerate_support_capped(&t, 3, 10_000),
            Err(Error::UnboundedSupport { cap: 10_000 })
        ));
    }

    #[test]
    fn geometric_constants_and_quadratic_fields() {
        // Σ_{k=0}^n C(n,k) 2^k = 3^n
        let t = BalancedTerm::new(
            one(),
            vec![NfElem::rational(Rational::from(2))],
            vec![
                Factor { form: form(1, &[0], 0), eps: 1 },
                Factor { form: form(0, &[1], 0), eps: -1 },
                Factor { form: form(1, &[-1], 0), eps: -1 },
            ],
            None,
            vec![],
        )
        .unwrap();
        assert_eq!(eval_multisum(&t, 5).unwrap().as_rational().unwrap(), &243);
        // Σ C(n,k) θ^k = (1+θ)^n with θ² = -2
        let k = NumberField::from_i64(&[2, 0, 1]).unwrap();
        let mut tq = t.clone();
        tq.c = vec![NfElem::theta(&k)];
        let tq = BalancedTerm::new(tq.c0, tq.c, tq.factors, None, vec![]).unwrap();
        let v = eval_multisum(&tq, 3).unwrap();
        let want = (&NfElem::one(&k) + &NfElem::theta(&k)).pow(3);
        assert_eq!(v, want);
    }

    #[test]
    fn json_roundtrip() {
        for t in [BalancedTerm::apery_like(), BalancedTerm::tet6j()] {
            let back = BalancedTerm::from_value(&t.to_value()).unwrap();
            assert_eq!(back, t);
        }
    }
}
