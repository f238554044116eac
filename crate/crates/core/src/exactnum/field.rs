use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use rug::{Integer, Rational};

use super::complex::BigComplex;
use super::poly::{self, RatPoly};
use crate::error::{Error, Result};

/// Whether irreducibility of the defining polynomial was proven.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Irreducibility {
    Verified,
    /// Degree above 4: accepted without a proof.
    Unverified,
}

/// `Q(θ)` for a monic irreducible integer polynomial. `Q` itself is the
/// degree-one field with minimal polynomial `x` (so `θ = 0`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumberField {
    minpoly: Vec<Integer>,
    irreducibility: Irreducibility,
}

impl NumberField {
    /// `minpoly` lists integer coefficients in ascending order and must be monic.
    pub fn new(minpoly: Vec<Integer>) -> Result<Arc<Self>> {
        let mut minpoly = minpoly;
        while minpoly.last().is_some_and(|c| *c == 0) {
            minpoly.pop();
        }
        if minpoly.len() < 2 {
            return Err(Error::InvalidInput(
                "minimal polynomial must have degree at least 1".into(),
            ));
        }
        if *minpoly.last().unwrap() != 1 {
            return Err(Error::InvalidInput(
                "minimal polynomial must be monic".into(),
            ));
        }
        let degree = minpoly.len() - 1;
        let irreducibility = if degree <= 4 {
            if !is_irreducible_small(&minpoly) {
                return Err(Error::InvalidInput(format!(
                    "polynomial {} is reducible over Q",
                    render_int_poly(&minpoly)
                )));
            }
            Irreducibility::Verified
        } else {
            eprintln!(
                "warning: irreducibility of degree-{degree} minimal polynomial is not verified"
            );
            Irreducibility::Unverified
        };
        Ok(Arc::new(NumberField {
            minpoly,
            irreducibility,
        }))
    }

    pub fn from_i64(minpoly: &[i64]) -> Result<Arc<Self>> {
        NumberField::new(minpoly.iter().map(|&c| Integer::from(c)).collect())
    }

    pub fn rationals() -> Arc<Self> {
        Arc::new(NumberField {
            minpoly: vec![Integer::new(), Integer::from(1)],
            irreducibility: Irreducibility::Verified,
        })
    }

    /// `Q(√d)` for a non-square integer `d`.
    pub fn quadratic(d: &Integer) -> Result<Arc<Self>> {
        NumberField::new(vec![Integer::from(-d), Integer::new(), Integer::from(1)])
    }

    pub fn degree(&self) -> usize {
        self.minpoly.len() - 1
    }

    pub fn minpoly(&self) -> &[Integer] {
        &self.minpoly
    }

    pub fn irreducibility(&self) -> Irreducibility {
        self.irreducibility
    }

    pub fn is_rationals(&self) -> bool {
        self.degree() == 1
    }

    fn minpoly_rat(&self) -> RatPoly {
        self.minpoly.iter().map(|c| Rational::from(c)).collect()
    }

    /// Complex roots of the minimal polynomial, sorted by (real, imag).
    pub fn roots(&self, prec: u32) -> Result<Vec<BigComplex>> {
        poly::poly_roots(&self.minpoly_rat(), prec)
    }

    /// Index of the root used when no embedding is specified: the
    /// lexicographically largest one (`+√d` or `+i√|d|` for quadratics).
    pub fn default_embedding(&self) -> usize {
        self.degree() - 1
    }

    /// For `x² + b x + c` returns `-b` (so that `θ̄ = -b - θ`).
    fn quadratic_trace(&self) -> Option<Integer> {
        (self.degree() == 2).then(|| Integer::from(-&self.minpoly[1]))
    }

    /// True for `Q(√d)` with `d < 0` (written as `x² + bx + c` with negative discriminant).
    pub fn is_imaginary_quadratic(&self) -> bool {
        if self.degree() != 2 {
            return false;
        }
        let b = &self.minpoly[1];
        let c = &self.minpoly[0];
        let disc = Integer::from(b * b) - Integer::from(c * 4);
        disc < 0
    }
}

fn render_int_poly(p: &[Integer]) -> String {
    let terms: Vec<String> = p
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, c)| **c != 0)
        .map(|(i, c)| match i {
            0 => format!("{c}"),
            1 => format!("{c}x"),
            _ => format!("{c}x^{i}"),
        })
        .collect();
    terms.join(" + ")
}

fn is_irreducible_small(p: &[Integer]) -> bool {
    let d = p.len() - 1;
    if d == 1 {
        return true;
    }
    let rat: RatPoly = p.iter().map(|c| Rational::from(c)).collect();
    // a monic integer polynomial has only integer rational roots, bounded by |p0|
    if p[0] == 0 {
        return false;
    }
    match poly::rational_roots(&rat) {
        Some(roots) if !roots.is_empty() => return false,
        Some(_) => {}
        None => {
            // constant term too large to enumerate; fall back to a numeric check
            if let Ok(roots) = poly::poly_roots(&rat, 128) {
                for r in roots {
                    if r.im().is_zero() {
                        let near = r.re().to_integer().unwrap_or_default();
                        if poly::eval(&rat, &Rational::from(near)) == 0 {
                            return false;
                        }
                    }
                }
            }
        }
    }
    if d <= 3 {
        return true;
    }
    // degree 4: try x^4 + a x^3 + b x^2 + c x + e = (x^2 + p x + q)(x^2 + r x + s)
    let e = &p[0];
    let Some(e64) = e.to_i64() else {
        return true;
    };
    let a = &p[3];
    let b = &p[2];
    let c = &p[1];
    let mut qs = Vec::new();
    let mut i = 1i64;
    while i.saturating_mul(i) <= e64.abs() {
        if e64 % i == 0 {
            qs.push(i);
            qs.push(-i);
            qs.push(e64 / i);
            qs.push(-(e64 / i));
        }
        i += 1;
    }
    for q in qs {
        let s = e64 / q;
        // p + r = a, q + s + p r = b, p s + q r = c
        // from the first and third: p (s - q) = c - q a
        let sq = s - q;
        let cand_ps: Vec<Integer> = if sq != 0 {
            let num = Integer::from(c - Integer::from(a * q));
            if Integer::from(&num % sq) != 0 {
                continue;
            }
            vec![num / sq]
        } else {
            // p r = b - 2q and p + r = a: p is a root of t^2 - a t + (b - 2q)
            let prod = Integer::from(b - 2 * q);
            let disc = Integer::from(a * a) - Integer::from(&prod * 4);
            if disc < 0 || !disc.is_perfect_square() {
                continue;
            }
            let sd = disc.sqrt();
            vec![
                Integer::from(a + &sd) / 2,
                Integer::from(a - &sd) / 2,
            ]
        };
        for pp in cand_ps {
            let r = Integer::from(a - &pp);
            let ok_b = Integer::from(q + s) + Integer::from(&pp * &r) == *b;
            let ok_c = Integer::from(&pp * s) + Integer::from(&r * q) == *c;
            if ok_b && ok_c {
                return false;
            }
        }
    }
    true
}

/// Exact element of a number field, stored as coordinates on the power basis.
#[derive(Clone)]
pub struct NfElem {
    field: Arc<NumberField>,
    coords: Vec<Rational>,
}

impl NfElem {
    pub fn new(field: Arc<NumberField>, coords: Vec<Rational>) -> Result<Self> {
        if coords.len() != field.degree() {
            return Err(Error::InvalidInput(format!(
                "expected {} coordinates, got {}",
                field.degree(),
                coords.len()
            )));
        }
        Ok(NfElem { field, coords })
    }

    pub fn from_rational(field: &Arc<NumberField>, r: Rational) -> Self {
        let mut coords = vec![Rational::new(); field.degree()];
        coords[0] = r;
        NfElem {
            field: field.clone(),
            coords,
        }
    }

    pub fn rational(r: Rational) -> Self {
        NfElem::from_rational(&NumberField::rationals(), r)
    }

    pub fn zero(field: &Arc<NumberField>) -> Self {
        NfElem::from_rational(field, Rational::new())
    }

    pub fn one(field: &Arc<NumberField>) -> Self {
        NfElem::from_rational(field, Rational::from(1))
    }

    /// The generator θ.
    pub fn theta(field: &Arc<NumberField>) -> Self {
        if field.degree() == 1 {
            return NfElem::from_rational(field, -Rational::from(&field.minpoly[0]));
        }
        let mut coords = vec![Rational::new(); field.degree()];
        coords[1] = Rational::from(1);
        NfElem {
            field: field.clone(),
            coords,
        }
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| *c == 0)
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.coords[1..]
            .iter()
            .all(|c| *c == 0)
            .then(|| &self.coords[0])
    }

    fn same_field(&self, other: &NfElem) -> Result<()> {
        if Arc::ptr_eq(&self.field, &other.field) || self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch(format!(
                "{} vs {}",
                render_int_poly(&self.field.minpoly),
                render_int_poly(&other.field.minpoly)
            )))
        }
    }

    fn reduce(&self, p: RatPoly) -> NfElem {
        let (_, r) = poly::divrem(&p, &self.field.minpoly_rat());
        let mut coords = vec![Rational::new(); self.field.degree()];
        for (i, c) in r.into_iter().enumerate() {
            coords[i] = c;
        }
        NfElem {
            field: self.field.clone(),
            coords,
        }
    }

    pub fn checked_add(&self, other: &NfElem) -> Result<NfElem> {
        self.same_field(other)?;
        Ok(NfElem {
            field: self.field.clone(),
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| Rational::from(a + b))
                .collect(),
        })
    }

    pub fn checked_sub(&self, other: &NfElem) -> Result<NfElem> {
        self.same_field(other)?;
        Ok(NfElem {
            field: self.field.clone(),
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| Rational::from(a - b))
                .collect(),
        })
    }

    pub fn checked_mul(&self, other: &NfElem) -> Result<NfElem> {
        self.same_field(other)?;
        if self.field.degree() == 1 {
            return Ok(NfElem {
                field: self.field.clone(),
                coords: vec![Rational::from(&self.coords[0] * &other.coords[0])],
            });
        }
        Ok(self.reduce(poly::mul(&self.coords, &other.coords)))
    }

    pub fn inverse(&self) -> Result<NfElem> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.field.degree() == 1 {
            return Ok(NfElem {
                field: self.field.clone(),
                coords: vec![Rational::from(self.coords[0].recip_ref())],
            });
        }
        let (g, s) = poly::gcdext_inverse_part(&self.coords, &self.field.minpoly_rat());
        if poly::degree(&g) != Some(0) {
            return Err(Error::Internal(
                "non-invertible element: minimal polynomial is reducible".into(),
            ));
        }
        Ok(self.reduce(s))
    }

    pub fn checked_div(&self, other: &NfElem) -> Result<NfElem> {
        self.same_field(other)?;
        self.checked_mul(&other.inverse()?)
    }

    pub fn pow(&self, e: u64) -> NfElem {
        let mut acc = NfElem::one(&self.field);
        let mut base = self.clone();
        let mut k = e;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn scale(&self, s: &Rational) -> NfElem {
        NfElem {
            field: self.field.clone(),
            coords: self.coords.iter().map(|c| Rational::from(c * s)).collect(),
        }
    }

    /// Galois conjugate in a quadratic field (`θ ↦ -b - θ`); identity on `Q`.
    pub fn conjugate(&self) -> Result<NfElem> {
        match self.field.degree() {
            1 => Ok(self.clone()),
            2 => {
                let t = Rational::from(self.field.quadratic_trace().unwrap());
                // x0 + x1 θ ↦ x0 + x1 (t - θ)
                let x0 = Rational::from(&self.coords[0] + Rational::from(&self.coords[1] * &t));
                let x1 = Rational::from(-&self.coords[1]);
                Ok(NfElem {
                    field: self.field.clone(),
                    coords: vec![x0, x1],
                })
            }
            d => Err(Error::Unsupported(format!(
                "conjugation is only defined for quadratic fields (degree {d})"
            ))),
        }
    }

    /// Squared modulus under the complex embedding, computed exactly for
    /// `Q` and quadratic fields (`x·x̄` for imaginary, `x²` for real ones).
    pub fn modulus_squared_exact(&self) -> Option<Rational> {
        match self.field.degree() {
            1 => Some(Rational::from(self.coords[0].square_ref())),
            2 => {
                let sq = if self.field.is_imaginary_quadratic() {
                    self * &self.conjugate().ok()?
                } else {
                    self * self
                };
                sq.as_rational().cloned()
            }
            _ => None,
        }
    }

    /// Evaluates at the `root_choice`-th complex root of the minimal polynomial.
    pub fn embed(&self, root_choice: usize, prec: u32) -> Result<BigComplex> {
        nf_embed(self, root_choice, prec)
    }

    pub fn to_complex(&self, prec: u32) -> BigComplex {
        nf_embed(self, self.field.default_embedding(), prec.max(53))
            .expect("default embedding is always valid")
    }
}

/// Minimum precision accepted by [`nf_embed`].
pub const MIN_EMBED_PRECISION: u32 = 53;

pub fn nf_embed(x: &NfElem, root_choice: usize, prec: u32) -> Result<BigComplex> {
    let degree = x.field.degree();
    if root_choice >= degree {
        return Err(Error::Precondition(format!(
            "root index {root_choice} out of range for degree {degree}"
        )));
    }
    if prec < MIN_EMBED_PRECISION {
        return Err(Error::Precondition(format!(
            "precision {prec} below minimum {MIN_EMBED_PRECISION}"
        )));
    }
    let work = prec + poly::GUARD_BITS + 16;
    if degree == 1 {
        return Ok(BigComplex::from_rational(&x.coords[0], prec));
    }
    let roots = x.field.roots(work)?;
    let theta = &roots[root_choice];
    let mut acc = BigComplex::zero(work);
    for c in x.coords.iter().rev() {
        acc = &(&acc * theta) + &BigComplex::from_rational(c, work);
    }
    Ok(acc.with_prec(prec))
}

/// The operations of [`nf_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn nf_arith(a: &NfElem, b: &NfElem, op: ArithOp) -> Result<NfElem> {
    match op {
        ArithOp::Add => a.checked_add(b),
        ArithOp::Sub => a.checked_sub(b),
        ArithOp::Mul => a.checked_mul(b),
        ArithOp::Div => a.checked_div(b),
    }
}

impl PartialEq for NfElem {
    fn eq(&self, other: &Self) -> bool {
        self.same_field(other).is_ok() && self.coords == other.coords
    }
}

impl fmt::Debug for NfElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NfElem({self})")
    }
}

impl fmt::Display for NfElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_rational() {
            return write!(f, "{r}");
        }
        let mut first = true;
        for (i, c) in self.coords.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            let sep = if first {
                if *c < 0 {
                    "-"
                } else {
                    ""
                }
            } else if *c < 0 {
                " - "
            } else {
                " + "
            };
            let a = Rational::from(c.abs_ref());
            let body = match i {
                0 => format!("{a}"),
                1 if a == 1 => "θ".to_string(),
                1 => format!("({a})θ"),
                _ if a == 1 => format!("θ^{i}"),
                _ => format!("({a})θ^{i}"),
            };
            write!(f, "{sep}{body}")?;
            first = false;
        }
        Ok(())
    }
}

// Operator forms panic on field mismatch or division by zero; use the
// `checked_*` methods when inputs are not known to be compatible.
impl<'a> Add<&'a NfElem> for &'a NfElem {
    type Output = NfElem;
    fn add(self, rhs: &NfElem) -> NfElem {
        self.checked_add(rhs).expect("number field mismatch")
    }
}

impl<'a> Sub<&'a NfElem> for &'a NfElem {
    type Output = NfElem;
    fn sub(self, rhs: &NfElem) -> NfElem {
        self.checked_sub(rhs).expect("number field mismatch")
    }
}

impl<'a> Mul<&'a NfElem> for &'a NfElem {
    type Output = NfElem;
    fn mul(self, rhs: &NfElem) -> NfElem {
        self.checked_mul(rhs).expect("number field mismatch")
    }
}

impl<'a> Div<&'a NfElem> for &'a NfElem {
    type Output = NfElem;
    fn div(self, rhs: &NfElem) -> NfElem {
        self.checked_div(rhs).expect("invalid number field division")
    }
}

impl Neg for &NfElem {
    type Output = NfElem;
    fn neg(self) -> NfElem {
        NfElem {
            field: self.field.clone(),
            coords: self.coords.iter().map(|c| Rational::from(-c)).collect(),
        }
    }
}
