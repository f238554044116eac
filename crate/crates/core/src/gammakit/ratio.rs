use rug::{Float, Rational};

use super::bernoulli::{bernoulli_numbers, bernoulli_polynomial};
use crate::error::{Error, Result};
use crate::exactnum::poly::{self, RatPoly};

/// `Γ(n+1-γ)/Γ(n+1) ≈ n^{-γ} Σ_k c_k n^{-k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaRatioSeries {
    pub gamma: Rational,
    pub order_k: usize,
    /// `c_0..=c_K`, `c_0 = 1`.
    pub coefficients: Vec<Rational>,
}

impl GammaRatioSeries {
    /// Truncated sum `n^{-γ} Σ_{k≤K} c_k n^{-k}`.
    pub fn eval(&self, n: &Rational, prec: u32) -> Result<Float> {
        if *n <= 0 {
            return Err(Error::Precondition("the series needs n > 0".into()));
        }
        let work = prec + 16;
        let inv = Rational::from(n.recip_ref());
        let mut acc = Rational::new();
        for c in self.coefficients.iter().rev() {
            acc = acc * &inv + c;
        }
        let ln_n = Float::with_val(work, n).ln();
        let scale = (-ln_n * Float::with_val(work, &self.gamma)).exp();
        Ok(Float::with_val(prec, scale * Float::with_val(work, &acc)))
    }
}

/// `p(1 - x)`.
fn reflect(p: &[Rational]) -> RatPoly {
    let one_minus = vec![Rational::from(1), Rational::from(-1)];
    let mut out: RatPoly = Vec::new();
    for c in p.iter().rev() {
        out = poly::add(&poly::mul(&out, &one_minus), std::slice::from_ref(c));
    }
    poly::trimmed(out)
}

/// The coefficients `c_0..=c_K` as polynomials in `γ`.
pub fn gamma_ratio_polynomials(k_max: usize) -> Vec<RatPoly> {
    let b = bernoulli_numbers(k_max + 1);
    // log Γ(n+a) - log Γ(n+1) - (a-1) log n
    //   ~ Σ_k (-1)^{k+1} (B_{k+1}(a) - B_{k+1}(1)) / (k(k+1)) n^{-k},  a = 1-γ
    let mut d: Vec<RatPoly> = vec![Vec::new()];
    for k in 1..=k_max {
        let bp = bernoulli_polynomial(k + 1, &b);
        let at_one = poly::eval(&bp, &Rational::from(1));
        let diff = poly::sub(&reflect(&bp), &[at_one]);
        let mut s = Rational::from((1, (k * (k + 1)) as u64));
        if k % 2 == 0 {
            s = -s;
        }
        d.push(poly::scale(&diff, &s));
    }
    // exp of Σ d_k t^k: m e_m = Σ_k k d_k e_{m-k}
    let mut e: Vec<RatPoly> = vec![vec![Rational::from(1)]];
    for m in 1..=k_max {
        let mut acc: RatPoly = Vec::new();
        for k in 1..=m {
            let term = poly::mul(&d[k], &e[m - k]);
            acc = poly::add(&acc, &poly::scale(&term, &Rational::from(k as u32)));
        }
        e.push(poly::trimmed(poly::scale(&acc, &Rational::from((1, m as u32)))));
    }
    e
}

pub fn gamma_ratio_series(gamma: &Rational, k_max: usize) -> GammaRatioSeries {
    let coefficients = gamma_ratio_polynomials(k_max)
        .iter()
        .map(|p| poly::eval(p, gamma))
        .collect();
    GammaRatioSeries {
        gamma: gamma.clone(),
        order_k: k_max,
        coefficients,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_two_coefficients() {
        let p = gamma_ratio_polynomials(2);
        assert_eq!(p[1], poly::scale(&poly::from_ints(&[0, -1, 1]), &Rational::from((1, 2))));
        assert_eq!(
            p[2],
            poly::scale(&poly::from_ints(&[0, 2, -3, -2, 3]), &Rational::from((1, 24)))
        );
    }

    #[test]
    fn trivial_gammas() {
        for g in [0, 1] {
            let s = gamma_ratio_series(&Rational::from(g), 6);
            assert_eq!(s.coefficients[0], 1);
            assert!(s.coefficients[1..].iter().all(|c| *c == 0), "{s:?}");
        }
    }

    #[test]
    fn gamma_two_is_exact_geometric() {
        // Γ(n-1)/Γ(n+1) = 1/(n(n-1)) = n^{-2} Σ n^{-k}
        let s = gamma_ratio_series(&Rational::from(2), 8);
        assert!(s.coefficients.iter().all(|c| *c == 1));
    }

    #[test]
    fn half_matches_lgamma() {
        let g = Rational::from((1, 2));
        let s = gamma_ratio_series(&g, 6);
        let n = 50u32;
        let prec = 200;
        let a = Float::with_val(prec, Float::with_val(prec, n) + 0.5f64).ln_gamma();
        let b = Float::with_val(prec, n + 1).ln_gamma();
        let exact = Float::with_val(prec, a - b).exp();
        let approx = s.eval(&Rational::from(n), prec).unwrap();
        let rel = Float::with_val(prec, (exact.clone() - approx) / exact).abs().to_f64();
        assert!(rel < 5e-12 * 2.0, "{rel}");
        assert!(rel > 1e-17);
    }
}
