//! Dense univariate polynomials over the rationals (ascending coefficient
//! order) and numerical root extraction.

use std::cmp::Ordering;

use rug::{Float, Integer, Rational};

use super::complex::BigComplex;
use crate::error::{Error, Result};

/// Guard bits added to the working precision of root finding.
pub const GUARD_BITS: u32 = 10;

pub type RatPoly = Vec<Rational>;

pub fn trim(p: &mut RatPoly) {
    while p.last().is_some_and(|c| *c == 0) {
        p.pop();
    }
}

pub fn trimmed(mut p: RatPoly) -> RatPoly {
    trim(&mut p);
    p
}

/// Degree of a trimmed polynomial; `None` for the zero polynomial.
pub fn degree(p: &[Rational]) -> Option<usize> {
    p.iter().rposition(|c| *c != 0)
}

pub fn add(a: &[Rational], b: &[Rational]) -> RatPoly {
    let n = a.len().max(b.len());
    let mut out = vec![Rational::new(); n];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] += c;
    }
    trimmed(out)
}

pub fn sub(a: &[Rational], b: &[Rational]) -> RatPoly {
    let n = a.len().max(b.len());
    let mut out = vec![Rational::new(); n];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] -= c;
    }
    trimmed(out)
}

pub fn mul(a: &[Rational], b: &[Rational]) -> RatPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::new(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if *x == 0 {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += Rational::from(x * y);
        }
    }
    trimmed(out)
}

pub fn scale(a: &[Rational], s: &Rational) -> RatPoly {
    trimmed(a.iter().map(|c| Rational::from(c * s)).collect())
}

pub fn derivative(a: &[Rational]) -> RatPoly {
    trimmed(
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| Rational::from(c * i as u32))
            .collect(),
    )
}

pub fn eval(a: &[Rational], x: &Rational) -> Rational {
    let mut acc = Rational::new();
    for c in a.iter().rev() {
        acc *= x;
        acc += c;
    }
    acc
}

/// Polynomial long division; panics on a zero divisor.
pub fn divrem(a: &[Rational], b: &[Rational]) -> (RatPoly, RatPoly) {
    let db = degree(b).expect("division by zero polynomial");
    let mut r = trimmed(a.to_vec());
    let Some(da) = degree(&r) else {
        return (Vec::new(), Vec::new());
    };
    if da < db {
        return (Vec::new(), r);
    }
    let lead = b[db].clone();
    let mut q = vec![Rational::new(); da - db + 1];
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let c = Rational::from(&r[dr] / &lead);
        let shift = dr - db;
        for (i, bc) in b.iter().enumerate().take(db + 1) {
            r[i + shift] -= Rational::from(&c * bc);
        }
        q[shift] = c;
        trim(&mut r);
    }
    (trimmed(q), r)
}

pub fn monic(a: &[Rational]) -> RatPoly {
    match degree(a) {
        None => Vec::new(),
        Some(d) => {
            let l = a[d].clone();
            a[..=d].iter().map(|c| Rational::from(c / &l)).collect()
        }
    }
}

/// Monic greatest common divisor.
pub fn gcd(a: &[Rational], b: &[Rational]) -> RatPoly {
    let mut x = trimmed(a.to_vec());
    let mut y = trimmed(b.to_vec());
    while degree(&y).is_some() {
        let (_, r) = divrem(&x, &y);
        x = y;
        y = r;
    }
    monic(&x)
}

/// Extended Euclid: returns `(g, s)` with `s·a ≡ g (mod m)`, `g` monic.
pub fn gcdext_inverse_part(a: &[Rational], m: &[Rational]) -> (RatPoly, RatPoly) {
    let mut r0 = trimmed(m.to_vec());
    let mut r1 = trimmed(a.to_vec());
    let mut s0: RatPoly = Vec::new();
    let mut s1: RatPoly = vec![Rational::from(1)];
    while degree(&r1).is_some() {
        let (q, r) = divrem(&r0, &r1);
        let s2 = sub(&s0, &mul(&q, &s1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s2;
    }
    let d = degree(&r0).map(|d| r0[d].clone()).unwrap_or_else(|| Rational::from(1));
    let inv = Rational::from(d.recip_ref());
    (scale(&r0, &inv), scale(&s0, &inv))
}

/// Square-free decomposition (Yun): returns `(factor, multiplicity)` pairs
/// whose product is `a` up to a constant.
pub fn squarefree_decomposition(a: &[Rational]) -> Vec<(RatPoly, usize)> {
    let a = monic(a);
    let Some(d) = degree(&a) else {
        return Vec::new();
    };
    if d == 0 {
        return Vec::new();
    }
    let da = derivative(&a);
    let mut out = Vec::new();
    let g = gcd(&a, &da);
    let mut b = divrem(&a, &g).0;
    let mut c = divrem(&da, &g).0;
    let mut dd = sub(&c, &derivative(&b));
    let mut i = 1;
    while degree(&b).is_some_and(|d| d > 0) {
        let h = gcd(&b, &dd);
        b = divrem(&b, &h).0;
        c = divrem(&dd, &h).0;
        if degree(&h).is_some_and(|d| d > 0) {
            out.push((h, i));
        }
        dd = sub(&c, &derivative(&b));
        i += 1;
    }
    out
}

/// Rational roots of a nonzero polynomial by the rational-root test.
/// Returns `None` when the candidate search would require factoring
/// integers beyond a fixed bound.
pub fn rational_roots(a: &[Rational]) -> Option<Vec<Rational>> {
    let d = degree(a)?;
    let ints = integer_primitive(&a[..=d]);
    let lowest = ints.iter().position(|c| *c != 0)?;
    let mut roots = Vec::new();
    if lowest > 0 {
        roots.push(Rational::new());
    }
    let a0 = ints[lowest].clone().abs();
    let an = ints[d].clone().abs();
    let bound = Integer::from(1_000_000_000_000u64);
    if a0 > bound || an > bound {
        return None;
    }
    let ps = divisors(a0.to_u64()?);
    let qs = divisors(an.to_u64()?);
    let poly: RatPoly = a[lowest..=d].to_vec();
    let mut seen = Vec::<Rational>::new();
    for p in &ps {
        for q in &qs {
            for sgn in [1i64, -1] {
                let cand = Rational::from((Integer::from(*p) * sgn, Integer::from(*q)));
                if seen.contains(&cand) {
                    continue;
                }
                seen.push(cand.clone());
                if eval(&poly, &cand) == 0 {
                    roots.push(cand);
                }
            }
        }
    }
    roots.sort();
    Some(roots)
}

/// Clears denominators and content: integer coefficients of `a` up to a
/// positive rational factor.
pub fn integer_primitive(a: &[Rational]) -> Vec<Integer> {
    let mut l = Integer::from(1);
    for c in a {
        l.lcm_mut(c.denom());
    }
    let ints: Vec<Integer> = a
        .iter()
        .map(|c| Integer::from(c.numer() * Integer::from(&l / c.denom())))
        .collect();
    let mut g = Integer::new();
    for c in &ints {
        g.gcd_mut(c);
    }
    if g == 0 {
        return ints;
    }
    ints.into_iter().map(|c| c / &g).collect()
}

fn divisors(n: u64) -> Vec<u64> {
    if n == 0 {
        return vec![1];
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut i = 1u64;
    while i * i <= n {
        if n % i == 0 {
            small.push(i);
            if i != n / i {
                large.push(n / i);
            }
        }
        i += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

/// Lexicographic (real, imag) order with a tolerance on the real part so
/// that conjugate pairs on a vertical line sort by imaginary part.
pub fn cmp_roots(a: &BigComplex, b: &BigComplex, tol: &Float) -> Ordering {
    let dr = Float::with_val(a.prec(), a.re() - b.re());
    let scale = Float::with_val(a.prec(), a.re().abs_ref()).max(&Float::with_val(a.prec(), 1));
    if Float::with_val(a.prec(), dr.abs_ref()) > Float::with_val(a.prec(), tol * &scale) {
        return a.re().partial_cmp(b.re()).unwrap_or(Ordering::Equal);
    }
    a.im().partial_cmp(b.im()).unwrap_or(Ordering::Equal)
}

fn horner_complex(p: &[BigComplex], z: &BigComplex) -> (BigComplex, BigComplex) {
    // value and derivative
    let prec = z.prec();
    let mut v = BigComplex::zero(prec);
    let mut dv = BigComplex::zero(prec);
    for c in p.iter().rev() {
        dv = &(&dv * z) + &v;
        v = &(&v * z) + c;
    }
    (v, dv)
}

/// Roots of a square-free polynomial by Aberth–Ehrlich iteration followed
/// by Newton polishing.
fn aberth(p: &[Rational], prec: u32) -> Result<Vec<BigComplex>> {
    let d = degree(p).ok_or_else(|| Error::InvalidInput("zero polynomial".into()))?;
    let work = prec + 2 * GUARD_BITS + 16;
    let pc: Vec<BigComplex> = p[..=d]
        .iter()
        .map(|c| BigComplex::from_rational(c, work))
        .collect();
    if d == 1 {
        let r = -(&pc[0] / &pc[1]);
        return Ok(vec![r]);
    }
    let lead = pc[d].abs_f64();
    let c0 = pc[0].abs_f64().max(f64::MIN_POSITIVE);
    let radius = (c0 / lead).powf(1.0 / d as f64).max(1e-6);
    let mut z: Vec<BigComplex> = (0..d)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * k as f64 / d as f64 + 0.4;
            BigComplex::from_f64(radius * ang.cos(), radius * ang.sin(), work)
        })
        .collect();
    let eps = Float::with_val(work, Float::i_exp(1, -(work as i32) + 24));
    let mut converged = false;
    for _ in 0..2000 {
        let mut max_rel = Float::new(work);
        for i in 0..d {
            let (v, dv) = horner_complex(&pc, &z[i]);
            if v.is_zero() {
                continue;
            }
            let ratio = &v / &dv;
            let mut s = BigComplex::zero(work);
            for j in 0..d {
                if j != i {
                    s = &s + &(&z[i] - &z[j]).recip();
                }
            }
            let denom = &BigComplex::one(work) - &(&ratio * &s);
            let w = &ratio / &denom;
            let mag = Float::with_val(work, z[i].abs().max(&Float::with_val(work, 1)));
            let rel = Float::with_val(work, w.abs() / &mag);
            if rel > max_rel {
                max_rel = rel;
            }
            z[i] = &z[i] - &w;
        }
        if max_rel <= eps {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence("Aberth iteration did not converge".into()));
    }
    for zi in z.iter_mut() {
        for _ in 0..2 {
            let (v, dv) = horner_complex(&pc, zi);
            if dv.is_zero() {
                break;
            }
            *zi = &*zi - &(&v / &dv);
        }
    }
    Ok(z)
}

/// All complex roots of `p` with multiplicity, sorted by (real, imag).
/// Tiny real or imaginary parts (below the working tolerance) are flushed
/// to zero so real and purely imaginary roots print cleanly.
pub fn poly_roots(p: &[Rational], prec: u32) -> Result<Vec<BigComplex>> {
    let d = degree(p).ok_or_else(|| Error::InvalidInput("zero polynomial has no roots".into()))?;
    if d == 0 {
        return Err(Error::InvalidInput(
            "constant polynomial has no roots".into(),
        ));
    }
    let mut roots = Vec::new();
    for (factor, mult) in squarefree_decomposition(&p[..=d]) {
        let rs = aberth(&factor, prec)?;
        for r in rs {
            for _ in 0..mult {
                roots.push(r.clone());
            }
        }
    }
    let tol = Float::with_val(prec, Float::i_exp(1, -(prec as i32) + GUARD_BITS as i32));
    let out_prec = prec;
    let mut roots: Vec<BigComplex> = roots
        .into_iter()
        .map(|r| {
            let scale = r.abs().max(&Float::with_val(r.prec(), 1));
            let lim = Float::with_val(r.prec(), &tol * &scale);
            let re = if Float::with_val(r.prec(), r.re().abs_ref()) <= lim {
                Float::new(out_prec)
            } else {
                Float::with_val(out_prec, r.re())
            };
            let im = if Float::with_val(r.prec(), r.im().abs_ref()) <= lim {
                Float::new(out_prec)
            } else {
                Float::with_val(out_prec, r.im())
            };
            BigComplex::new(re, im)
        })
        .collect();
    roots.sort_by(|a, b| cmp_roots(a, b, &tol));
    Ok(roots)
}

pub fn from_ints(c: &[i64]) -> RatPoly {
    c.iter().map(|&x| Rational::from(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn factorable_quadratic() {
        let roots = poly_roots(&from_ints(&[6, -5, 1]), 128).unwrap();
        assert_eq!(roots.len(), 2);
        assert!((roots[0].re().to_f64() - 2.0).abs() < 1e-30);
        assert!((roots[1].re().to_f64() - 3.0).abs() < 1e-30);
        assert!(roots[0].im().is_zero());
    }

    #[test]
    fn apery_characteristic_roots() {
        let roots = poly_roots(&from_ints(&[1, -34, 1]), 200).unwrap();
        let sqrt2 = Float::with_val(200, 2).sqrt();
        let lo = Float::with_val(200, 17 - Float::with_val(200, &sqrt2 * 12));
        let hi = Float::with_val(200, 17 + Float::with_val(200, &sqrt2 * 12));
        assert!(Float::with_val(200, roots[0].re() - &lo).abs() < 1e-55);
        assert!(Float::with_val(200, roots[1].re() - &hi).abs() < 1e-55);
        assert!((roots[0].re().to_f64() - 0.029437).abs() < 1e-5);
    }

    #[test]
    fn imaginary_pair_sorted_by_imag() {
        let roots = poly_roots(&from_ints(&[2, 0, 1]), 128).unwrap();
        assert!(roots[0].re().is_zero() && roots[1].re().is_zero());
        assert!((roots[0].im().to_f64() + 2f64.sqrt()).abs() < 1e-15);
        assert!((roots[1].im().to_f64() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn repeated_roots_keep_multiplicity() {
        // (x-1)^2 (x+2)
        let p = mul(&mul(&from_ints(&[-1, 1]), &from_ints(&[-1, 1])), &from_ints(&[2, 1]));
        let roots = poly_roots(&p, 128).unwrap();
        assert_eq!(roots.len(), 3);
        assert!((roots[0].re().to_f64() + 2.0).abs() < 1e-30);
        assert!((roots[1].re().to_f64() - 1.0).abs() < 1e-30);
        assert!((roots[2].re().to_f64() - 1.0).abs() < 1e-30);
    }

    #[test]
    fn zero_polynomial_is_rejected() {
        assert!(poly_roots(&[], 64).is_err());
        assert!(poly_roots(&from_ints(&[0, 0]), 64).is_err());
    }

    #[test]
    fn division_and_gcd() {
        let a = mul(&from_ints(&[-1, 1]), &from_ints(&[3, 0, 1]));
        let (q, rem) = divrem(&a, &from_ints(&[-1, 1]));
        assert_eq!(q, from_ints(&[3, 0, 1]));
        assert!(rem.is_empty());
        let g = gcd(&a, &mul(&from_ints(&[-1, 1]), &from_ints(&[5, 1])));
        assert_eq!(g, from_ints(&[-1, 1]));
    }

    #[test]
    fn rational_root_search() {
        // (2x - 1)(x + 3)(x^2 + 1)
        let p = mul(&mul(&from_ints(&[-1, 2]), &from_ints(&[3, 1])), &from_ints(&[1, 0, 1]));
        let roots = rational_roots(&p).unwrap();
        assert_eq!(roots, vec![r(-3, 1), r(1, 2)]);
    }

    #[test]
    fn squarefree_parts() {
        let p = mul(&mul(&from_ints(&[-1, 1]), &from_ints(&[-1, 1])), &from_ints(&[2, 1]));
        let parts = squarefree_decomposition(&p);
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0], (from_ints(&[2, 1]), 1));
        assert_eq!(parts[1], (from_ints(&[-1, 1]), 2));
    }
}
