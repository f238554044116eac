//! Exact and arbitrary-precision arithmetic: rationals, number fields
//! `Q(θ)`, multiprecision complex floats, and polynomial roots.

mod complex;
mod field;
pub mod poly;

use std::fmt;

pub use complex::{prec_digits, BigComplex};
pub use field::{
    nf_arith, nf_embed, ArithOp, Irreducibility, NfElem, NumberField, MIN_EMBED_PRECISION,
};
pub use poly::{poly_roots, RatPoly};
pub use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};

/// Parses `"p/q"`, `"p"` or a signed integer into a normalized rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let n: Integer = num
        .parse()
        .map_err(|_| Error::InvalidInput(format!("bad rational literal {s:?}")))?;
    let d: Integer = den
        .parse()
        .map_err(|_| Error::InvalidInput(format!("bad rational literal {s:?}")))?;
    if d == 0 {
        return Err(Error::InvalidInput(format!(
            "zero denominator in {s:?}"
        )));
    }
    Ok(Rational::from((n, d)))
}

/// Arithmetic shared by the exact and floating coefficient domains, so
/// that algorithms such as the formal-solution cascade run unchanged over
/// `Q(θ)` and over multiprecision complex numbers.
pub trait Scalar: Clone + fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self {
        self.from_rational_like(&Rational::from(1))
    }
    fn from_rational_like(&self, r: &Rational) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Result<Self>;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn scale(&self, r: &Rational) -> Self {
        self.mul(&self.from_rational_like(r))
    }
}

impl Scalar for NfElem {
    fn zero_like(&self) -> Self {
        NfElem::zero(self.field())
    }
    fn from_rational_like(&self, r: &Rational) -> Self {
        NfElem::from_rational(self.field(), r.clone())
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Result<Self> {
        self.checked_div(other)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        NfElem::is_zero(self)
    }
    fn scale(&self, r: &Rational) -> Self {
        NfElem::scale(self, r)
    }
}

impl Scalar for BigComplex {
    fn zero_like(&self) -> Self {
        BigComplex::zero(self.prec())
    }
    fn from_rational_like(&self, r: &Rational) -> Self {
        BigComplex::from_rational(r, self.prec())
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self / other)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        BigComplex::is_zero(self)
    }
    fn scale(&self, r: &Rational) -> Self {
        self.scale_rational(r)
    }
}

/// A coefficient value: exact (rational or number-field) or numeric.
#[derive(Clone, Debug, PartialEq)]
pub enum Coeff {
    Exact(NfElem),
    Numeric(BigComplex),
}

impl Coeff {
    pub fn rational(r: Rational) -> Self {
        Coeff::Exact(NfElem::rational(r))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Coeff::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coeff::Exact(x) => x.is_zero(),
            Coeff::Numeric(z) => z.is_zero(),
        }
    }

    pub fn as_exact(&self) -> Option<&NfElem> {
        match self {
            Coeff::Exact(x) => Some(x),
            Coeff::Numeric(_) => None,
        }
    }

    /// Complex value under the given embedding (ignored for numeric values).
    pub fn to_complex(&self, embedding: usize, prec: u32) -> Result<BigComplex> {
        match self {
            Coeff::Exact(x) => {
                let idx = if x.field().degree() == 1 { 0 } else { embedding };
                nf_embed(x, idx, prec.max(MIN_EMBED_PRECISION))
            }
            Coeff::Numeric(z) => Ok(z.clone()),
        }
    }

    fn binary(
        &self,
        other: &Coeff,
        embedding: usize,
        prec: u32,
        exact: impl Fn(&NfElem, &NfElem) -> Result<NfElem>,
        numeric: impl Fn(&BigComplex, &BigComplex) -> Result<BigComplex>,
    ) -> Result<Coeff> {
        match (self, other) {
            (Coeff::Exact(a), Coeff::Exact(b)) => {
                let (a, b) = lift_pair(a, b);
                Ok(Coeff::Exact(exact(&a, &b)?))
            }
            _ => {
                let a = self.to_complex(embedding, prec)?;
                let b = other.to_complex(embedding, prec)?;
                Ok(Coeff::Numeric(numeric(&a, &b)?))
            }
        }
    }

    pub fn add(&self, other: &Coeff, embedding: usize, prec: u32) -> Result<Coeff> {
        self.binary(other, embedding, prec, |a, b| a.checked_add(b), |a, b| Ok(a + b))
    }

    pub fn mul(&self, other: &Coeff, embedding: usize, prec: u32) -> Result<Coeff> {
        self.binary(other, embedding, prec, |a, b| a.checked_mul(b), |a, b| Ok(a * b))
    }

    pub fn sub(&self, other: &Coeff, embedding: usize, prec: u32) -> Result<Coeff> {
        self.binary(other, embedding, prec, |a, b| a.checked_sub(b), |a, b| Ok(a - b))
    }

    pub fn div(&self, other: &Coeff, embedding: usize, prec: u32) -> Result<Coeff> {
        self.binary(
            other,
            embedding,
            prec,
            |a, b| a.checked_div(b),
            |a, b| Scalar::div(a, b),
        )
    }
}

/// Moves a rational element into the other operand's field.
pub fn lift_pair(a: &NfElem, b: &NfElem) -> (NfElem, NfElem) {
    match (a.field().degree(), b.field().degree()) {
        (1, d) if d > 1 => (NfElem::from_rational(b.field(), a.coords()[0].clone()), b.clone()),
        (d, 1) if d > 1 => (a.clone(), NfElem::from_rational(a.field(), b.coords()[0].clone())),
        _ => (a.clone(), b.clone()),
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::Exact(x) => write!(f, "{x}"),
            Coeff::Numeric(z) => write!(f, "{z}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn field_elem(k: &std::sync::Arc<NumberField>, a: (i64, i64), b: (i64, i64)) -> NfElem {
        NfElem::new(
            k.clone(),
            vec![Rational::from(a), Rational::from(b)],
        )
        .unwrap()
    }

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("-6/4").unwrap(), Rational::from((-3, 2)));
        assert_eq!(parse_rational(" 7 ").unwrap(), Rational::from(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    proptest! {
        #[test]
        fn rational_normalization(n in -10_000i64..10_000, d in 1i64..10_000, neg in any::<bool>()) {
            let d = if neg { -d } else { d };
            let r = parse_rational(&format!("{n}/{d}")).unwrap();
            prop_assert!(*r.denom() >= 1);
            let g = Integer::from(r.numer().gcd_ref(r.denom()));
            prop_assert!(r.numer().is_zero() || g == 1);
            prop_assert_eq!(Rational::from(r.numer() * d), Rational::from(r.denom() * n));
        }

        #[test]
        fn embedding_is_a_ring_homomorphism(
            a0 in -50i64..50, a1 in -50i64..50, b0 in -50i64..50, b1 in -50i64..50,
            da in 1i64..20, db in 1i64..20, imaginary in any::<bool>(), root in 0usize..2,
        ) {
            let k = if imaginary {
                NumberField::from_i64(&[2, 0, 1]).unwrap()
            } else {
                NumberField::from_i64(&[-3, 0, 1]).unwrap()
            };
            let x = field_elem(&k, (a0, da), (a1, db));
            let y = field_elem(&k, (b0, db), (b1, da));
            let prec = 160;
            let ex = x.embed(root, prec).unwrap();
            let ey = y.embed(root, prec).unwrap();
            let tol = 2f64.powi(-(prec as i32) + 10 + 16);
            let prod = (&x * &y).embed(root, prec).unwrap();
            let sum = (&x + &y).embed(root, prec).unwrap();
            prop_assert!((&prod - &(&ex * &ey)).abs_f64() <= tol * (1.0 + ex.abs_f64() * ey.abs_f64()));
            prop_assert!((&sum - &(&ex + &ey)).abs_f64() <= tol * (1.0 + ex.abs_f64() + ey.abs_f64()));
        }

        #[test]
        fn roots_of_products_of_linear_factors(rs in proptest::collection::vec((-20i64..20, 1i64..6), 1..5)) {
            let mut p: RatPoly = vec![Rational::from(1)];
            let mut expected: Vec<f64> = Vec::new();
            for &(n, d) in &rs {
                let r = Rational::from((n, d));
                expected.push(r.to_f64());
                p = poly::mul(&p, &[Rational::from(-r), Rational::from(1)]);
            }
            expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let roots = poly_roots(&p, 128).unwrap();
            prop_assert_eq!(roots.len(), expected.len());
            for (z, e) in roots.iter().zip(&expected) {
                prop_assert!((z.re().to_f64() - e).abs() < 1e-13, "{:?} vs {}", z, e);
                prop_assert!(z.im().to_f64().abs() < 1e-20);
            }
        }
    }
}
