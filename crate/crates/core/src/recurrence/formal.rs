use std::sync::Arc;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use super::{characteristic_polynomial, Recurrence};
use crate::error::{Error, Result};
use crate::exactnum::poly::{self, RatPoly};
use crate::exactnum::{BigComplex, Coeff, NfElem, NumberField, Scalar};
use crate::series::{ExpansionTerm, NilssonExpansion, TruncatedSeries};

pub const DEFAULT_ORDER: usize = 10;

/// `a_n ~ λⁿ n^α (1 + c_1/n + … + c_K/n^K)`; `α` is the growth exponent
/// (so the Nilsson index is `-α`).
#[derive(Clone, Debug, PartialEq)]
pub struct FormalSolution {
    pub lambda: Coeff,
    pub alpha: Coeff,
    pub log_degree: u32,
    pub g: TruncatedSeries,
    /// Embedding that turns exact data into complex numbers.
    pub embedding: usize,
}

impl FormalSolution {
    pub fn alpha_rational(&self) -> Option<Rational> {
        self.alpha
            .as_exact()
            .and_then(|a| a.as_rational().cloned())
    }

    pub fn is_exact(&self) -> bool {
        self.lambda.is_exact()
    }

    pub fn lambda_complex(&self, prec: u32) -> Result<BigComplex> {
        self.lambda.to_complex(self.embedding, prec)
    }
}

/// `P_i(x) = x^D p_i(1/x)` as ascending coefficient lists.
fn reversed_coeffs(rec: &Recurrence) -> Vec<RatPoly> {
    let d = rec.degree();
    rec.coeffs()
        .iter()
        .map(|p| {
            (0..=d)
                .map(|t| p.get(d - t).cloned().unwrap_or_default())
                .collect()
        })
        .collect()
}

/// Birkhoff cascade for one simple root `λ`.
///
/// With `x = 1/n` and `T_k(x) = Σ_i λ^i P_i(x) (1+ix)^{α-k}` the ansatz
/// turns into `Σ_k c_k x^k T_k(x) = 0`; `[x^0]T_k = χ(λ) = 0` and
/// `[x^1]T_k = (α-k) λχ'(λ) + Σ_i λ^i [x^1]P_i`.
fn cascade<S: Scalar>(pc: &[RatPoly], lambda: &S, order: usize) -> Result<(S, Vec<S>)> {
    let l = pc.len() - 1;
    let mut pows = vec![lambda.one_like()];
    for _ in 0..l {
        let next = pows.last().unwrap().mul(lambda);
        pows.push(next);
    }
    let zero = lambda.zero_like();
    let coeff_at = |i: usize, t: usize| pc[i].get(t).cloned().unwrap_or_default();
    let mut slope = zero.clone();
    let mut sub = zero.clone();
    for i in 0..=l {
        slope = slope.add(&pows[i].scale(&Rational::from(Integer::from(i) * coeff_at(i, 0))));
        sub = sub.add(&pows[i].scale(&coeff_at(i, 1)));
    }
    if slope.is_zero() {
        return Err(Error::Unsupported(
            "repeated characteristic root: log terms required, which are not supported".into(),
        ));
    }
    let alpha = sub.div(&slope)?.neg();
    let top = order + 1;
    // binom(α-k, s) for s ≤ top
    let binoms = |k: usize| -> Vec<S> {
        let a = alpha.sub(&alpha.from_rational_like(&Rational::from(k)));
        let mut b = vec![alpha.one_like()];
        for s in 1..=top {
            let num = a.sub(&alpha.from_rational_like(&Rational::from(s - 1)));
            let next = b[s - 1].mul(&num).scale(&Rational::from((1, s as i64)));
            b.push(next);
        }
        b
    };
    let tcoef = |bk: &[S], j: usize| -> S {
        let mut acc = zero.clone();
        for (i, pw) in pows.iter().enumerate() {
            let mut inner_s = zero.clone();
            for t in 0..=j {
                let p = coeff_at(i, t);
                if p == 0 {
                    continue;
                }
                let ipow = Rational::from(Integer::from(i).pow((j - t) as u32));
                if ipow == 0 {
                    continue;
                }
                inner_s = inner_s.add(&bk[j - t].scale(&Rational::from(&p * &ipow)));
            }
            acc = acc.add(&pw.mul(&inner_s));
        }
        acc
    };
    let all_binoms: Vec<Vec<S>> = (0..=order).map(binoms).collect();
    let mut c = vec![alpha.one_like()];
    for m in 2..=top {
        let mut num = zero.clone();
        for (k, ck) in c.iter().enumerate().take(m - 1) {
            num = num.add(&ck.mul(&tcoef(&all_binoms[k], m - k)));
        }
        let den = tcoef(&all_binoms[m - 1], 1);
        c.push(num.div(&den)?.neg());
    }
    Ok((alpha, c))
}

/// `n = s²·d` with `d` squarefree up to trial division.
fn square_split(n: &Integer) -> (Integer, Integer) {
    let mut s = Integer::from(1);
    let mut d = Integer::from(n.signum_ref());
    let mut r = Integer::from(n.abs_ref());
    let mut p = Integer::from(2);
    while Integer::from(&p * &p) <= r && p < 2_000_000 {
        let mut e = 0u32;
        while r.is_divisible(&p) {
            r /= &p;
            e += 1;
        }
        if e >= 2 {
            s *= Integer::from((&p).pow(e / 2));
        }
        if e % 2 == 1 {
            d *= &p;
        }
        p += 1;
    }
    if r.is_perfect_square() {
        s *= r.sqrt();
    } else {
        d *= r;
    }
    (s, d)
}

fn exact_solution(
    pc: &[RatPoly],
    lambda: NfElem,
    order: usize,
    embedding: usize,
) -> Result<FormalSolution> {
    let (alpha, c) = cascade(pc, &lambda, order)?;
    Ok(FormalSolution {
        lambda: Coeff::Exact(lambda),
        alpha: Coeff::Exact(alpha),
        log_degree: 0,
        g: TruncatedSeries::normalized(c.into_iter().map(Coeff::Exact).collect())?,
        embedding,
    })
}

fn conjugate_solution(s: &FormalSolution) -> Result<FormalSolution> {
    let conj = |c: &Coeff| -> Result<Coeff> {
        match c {
            Coeff::Exact(x) => Ok(Coeff::Exact(x.conjugate()?)),
            other => Ok(other.clone()),
        }
    };
    let mut g = s
        .g
        .coeffs()
        .iter()
        .map(conj)
        .collect::<Result<Vec<_>>>()?;
    g[0] = Coeff::rational(Rational::from(1));
    Ok(FormalSolution {
        lambda: conj(&s.lambda)?,
        alpha: conj(&s.alpha)?,
        log_degree: 0,
        g: TruncatedSeries::normalized(g)?,
        embedding: s.embedding,
    })
}

/// One formal solution per characteristic root, exact whenever the roots
/// are rational or quadratic irrationalities.
pub fn formal_solutions(rec: &Recurrence, order: usize, prec: u32) -> Result<Vec<FormalSolution>> {
    let chi = characteristic_polynomial(rec);
    if poly::degree(&chi) != Some(rec.order()) {
        return Err(Error::Unsupported(
            "leading coefficients have unequal degrees at infinity: \
             ramified/exponential-subdominant regime unsupported"
                .into(),
        ));
    }
    if chi[0] == 0 {
        return Err(Error::Unsupported(
            "zero characteristic root: ramified/exponential-subdominant regime unsupported".into(),
        ));
    }
    let g = poly::gcd(&chi, &poly::derivative(&chi));
    if poly::degree(&g) != Some(0) {
        return Err(Error::Unsupported(
            "repeated characteristic root: log terms required, which are not supported".into(),
        ));
    }
    let pc = reversed_coeffs(rec);
    let mut out = Vec::new();
    let mut rest = chi.clone();
    let q = NumberField::rationals();
    for r in poly::rational_roots(&chi).unwrap_or_default() {
        rest = poly::divrem(&rest, &[Rational::from(-&r), Rational::from(1)]).0;
        out.push(exact_solution(&pc, NfElem::from_rational(&q, r), order, 0)?);
    }
    match poly::degree(&rest) {
        Some(0) | None => {}
        Some(2) => {
            let (a, b, c) = (&rest[2], &rest[1], &rest[0]);
            let disc = Rational::from(b * b) - Rational::from(4 * Rational::from(a * c));
            let (num, den) = disc.into_numer_denom();
            let (s, d) = square_split(&Integer::from(&num * &den));
            let k: Arc<NumberField> = NumberField::new(vec![-d, Integer::new(), Integer::from(1)])?;
            // λ = (-b + (s/den)·θ) / 2a with θ = √d
            let two_a = Rational::from(2 * a);
            let lam = NfElem::new(
                k.clone(),
                vec![
                    Rational::from(-b) / &two_a,
                    Rational::from((s, den)) / two_a,
                ],
            )?;
            let emb = k.default_embedding();
            let first = exact_solution(&pc, lam, order, emb)?;
            out.push(conjugate_solution(&first)?);
            out.push(first);
        }
        Some(_) => {
            let work = prec + 64;
            for z in crate::exactnum::poly_roots(&rest, work)? {
                let (alpha, c) = cascade(&pc, &z, order)?;
                let g = c
                    .into_iter()
                    .enumerate()
                    .map(|(i, x)| {
                        if i == 0 {
                            Coeff::rational(Rational::from(1))
                        } else {
                            Coeff::Numeric(x.with_prec(prec))
                        }
                    })
                    .collect();
                out.push(FormalSolution {
                    lambda: Coeff::Numeric(z.with_prec(prec)),
                    alpha: Coeff::Numeric(alpha.with_prec(prec)),
                    log_degree: 0,
                    g: TruncatedSeries::normalized(g)?,
                    embedding: 0,
                });
            }
        }
    }
    let key = |s: &FormalSolution| -> (f64, f64) {
        s.lambda_complex(64).map(|z| z.to_f64()).unwrap_or((0.0, 0.0))
    };
    out.sort_by(|a, b| {
        let (ka, kb) = (key(a), key(b));
        ka.partial_cmp(&kb).unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(out)
}

/// Normalized residuals `|Σ_i p_i(n) â(n+i)| / |λⁿ n^{α+D}|`.
pub fn residual_check(
    rec: &Recurrence,
    sol: &FormalSolution,
    n_grid: &[u64],
    prec: u32,
) -> Result<Vec<Float>> {
    let work = prec + 64;
    let lambda = sol.lambda_complex(work)?;
    let alpha = sol.alpha.to_complex(sol.embedding, work)?;
    let c: Vec<BigComplex> = sol
        .g
        .coeffs()
        .iter()
        .map(|x| x.to_complex(sol.embedding, work))
        .collect::<Result<_>>()?;
    let d = rec.degree();
    let mut out = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        if n < 2 {
            return Err(Error::Precondition("residuals are evaluated at n >= 2".into()));
        }
        let mut sum = BigComplex::zero(work);
        let mut lam_i = BigComplex::one(work);
        for (i, p) in rec.coeffs().iter().enumerate() {
            let m = Float::with_val(work, n + i as u64);
            let pv = poly::eval(p, &Rational::from(n));
            let inv = Float::with_val(work, m.recip_ref());
            let mut series = BigComplex::zero(work);
            let mut pw = Float::with_val(work, 1);
            for ck in &c {
                series = &series + &ck.scale(&pw);
                pw *= &inv;
            }
            let term = &(&lam_i * &BigComplex::real_base_pow(&m, &alpha)) * &series;
            sum = &sum + &term.scale_rational(&pv);
            lam_i = &lam_i * &lambda;
        }
        let nf = Float::with_val(work, n);
        let norm = BigComplex::real_base_pow(&nf, &alpha)
            .scale(&Float::with_val(work, (&nf).pow(d as u32)));
        out.push(Float::with_val(prec, (&sum / &norm).abs()));
    }
    Ok(out)
}

/// Expansion built from the dominant-modulus solutions, with every
/// Stokes constant set to 1 (they are not determined by the recurrence).
pub fn formal_expansion(sols: &[FormalSolution], prec: u32) -> Result<NilssonExpansion> {
    if sols.is_empty() {
        return Err(Error::Precondition("no formal solutions".into()));
    }
    let mods: Vec<f64> = sols
        .iter()
        .map(|s| s.lambda_complex(128).map(|z| z.abs_f64()))
        .collect::<Result<_>>()?;
    let top = mods.iter().cloned().fold(0.0, f64::max);
    let mut lambdas = Vec::new();
    let mut terms = Vec::new();
    let mut embedding = 0;
    for (s, m) in sols.iter().zip(&mods) {
        if (m - top).abs() > 1e-12 * top {
            continue;
        }
        let alpha = s.alpha_rational().ok_or_else(|| {
            Error::Unsupported(format!(
                "exponent {} is not rational: not Nilsson-representable",
                s.alpha
            ))
        })?;
        if s.lambda.as_exact().is_some_and(|x| x.field().degree() > 1) {
            embedding = s.embedding;
        }
        terms.push(ExpansionTerm {
            lambda_index: lambdas.len(),
            alpha: -alpha,
            beta: 0,
            stokes: Coeff::rational(Rational::from(1)),
            g: s.g.clone(),
        });
        lambdas.push(s.lambda.clone());
    }
    NilssonExpansion::new(lambdas, terms, embedding, prec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn geometric_solutions_are_exact() {
        let rec = Recurrence::from_ints(&[&[6], &[-5], &[1]], None).unwrap();
        let sols = formal_solutions(&rec, 4, 128).unwrap();
        assert_eq!(sols.len(), 2);
        for (s, l) in sols.iter().zip([2, 3]) {
            assert_eq!(s.lambda, Coeff::rational(Rational::from(l)));
            assert_eq!(s.alpha_rational().unwrap(), 0);
            assert!(s.g.coeffs()[1..].iter().all(Coeff::is_zero));
            let res = residual_check(&rec, s, &[10, 100], 128).unwrap();
            assert!(res.iter().all(|r| r.is_zero()));
        }
    }

    #[test]
    fn apery_solutions() {
        let rec = super::super::tests::apery();
        let sols = formal_solutions(&rec, 6, 128).unwrap();
        assert_eq!(sols.len(), 2);
        for (s, sign) in sols.iter().zip([-1, 1]) {
            let x = s.lambda.as_exact().unwrap();
            assert_eq!(x.field().minpoly(), &[Integer::from(-2), Integer::new(), Integer::from(1)]);
            assert_eq!(x.coords(), &[q(17, 1), q(12 * sign, 1)]);
            assert_eq!(s.alpha_rational().unwrap(), q(-3, 2));
        }
        let again = formal_solutions(&rec, 6, 512).unwrap();
        assert_eq!(again, sols);
        let r = residual_check(&rec, &sols[1], &[50, 100, 200], 256).unwrap();
        let ratio = Float::with_val(64, &r[2] / &r[1]).to_f64();
        let target = 2f64.powi(-7);
        assert!(ratio > target / 4.0 && ratio < target * 4.0, "ratio {ratio}");
    }

    #[test]
    fn first_order_rational_exponent() {
        // (n+1) a_{n+1} = (n + 1/2) a_n  ⇒  a_n ~ C n^{-1/2}
        let rec = Recurrence::new(
            vec![vec![q(-1, 2), q(-1, 1)], vec![q(1, 1), q(1, 1)]],
            None,
        )
        .unwrap();
        let s = &formal_solutions(&rec, 3, 128).unwrap()[0];
        assert_eq!(s.alpha_rational().unwrap(), q(-1, 2));
        // Γ(n+1/2)/Γ(n+1) = n^{-1/2}(1 - 1/(8n) + 1/(128n²) + …)
        let c = s.g.coeffs();
        assert_eq!(c[1].as_exact().unwrap().as_rational().unwrap(), &q(-1, 8));
        assert_eq!(c[2].as_exact().unwrap().as_rational().unwrap(), &q(1, 128));
    }

    #[test]
    fn cubic_roots_fall_back_to_numeric() {
        // a_{n+3} = a_{n+1} + a_n has the irreducible χ = x³ - x - 1
        let rec = Recurrence::from_ints(&[&[-1], &[-1], &[0], &[1]], None).unwrap();
        let sols = formal_solutions(&rec, 2, 128).unwrap();
        assert_eq!(sols.len(), 3);
        assert!(sols.iter().all(|s| !s.is_exact()));
        let plastic = sols
            .iter()
            .map(|s| s.lambda_complex(128).unwrap().to_f64())
            .find(|z| z.1.abs() < 1e-30)
            .unwrap();
        assert!((plastic.0 - 1.324_717_957_244_746).abs() < 1e-14);
    }

    #[test]
    fn unsupported_regimes() {
        let repeated = Recurrence::from_ints(&[&[1], &[-2], &[1]], None).unwrap();
        assert!(matches!(formal_solutions(&repeated, 2, 64), Err(Error::Unsupported(m)) if m.contains("log terms")));
        let zero = Recurrence::from_ints(&[&[1], &[0, 1], &[0, 2]], None).unwrap();
        assert!(matches!(formal_solutions(&zero, 2, 64), Err(Error::Unsupported(m)) if m.contains("zero")));
        let ramified = Recurrence::from_ints(&[&[0, 1], &[0, 1], &[1]], None).unwrap();
        assert!(matches!(formal_solutions(&ramified, 2, 64), Err(Error::Unsupported(m)) if m.contains("ramified")));
    }

    #[test]
    fn squarefree_split() {
        assert_eq!(square_split(&Integer::from(-1692800)), (Integer::from(920), Integer::from(-2)));
        assert_eq!(square_split(&Integer::from(1152)), (Integer::from(24), Integer::from(2)));
        assert_eq!(square_split(&Integer::from(49)), (Integer::from(7), Integer::from(1)));
    }
}
