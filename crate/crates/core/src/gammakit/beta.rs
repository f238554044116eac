use rug::{Float, Rational};

use super::pbeta::p_beta_polynomial;
use super::special::ln_gamma;
use crate::error::{Error, Result};
use crate::exactnum::BigComplex;

/// `I_{γ,β}(n) = ∫_0^∞ z^{γ-1} (log z)^β / (1+z)^{n+1} dz`.
#[derive(Clone, Debug)]
pub struct BetaIntegralValue {
    pub gamma: Rational,
    pub beta: u32,
    pub n: u64,
    pub value: BigComplex,
}

fn check_range(gamma: &Rational, n: u64) -> Result<()> {
    if *gamma <= 0 || *gamma >= n + 1 {
        return Err(Error::InvalidInput(format!(
            "the integral converges only for 0 < γ < n+1 (γ = {gamma}, n = {n})"
        )));
    }
    Ok(())
}

/// `Γ(γ)Γ(n+1-γ)/Γ(n+1) · p_β`.
pub fn beta_integral_closed(
    gamma: &Rational,
    beta: u32,
    n: u64,
    prec: u32,
) -> Result<BetaIntegralValue> {
    check_range(gamma, n)?;
    let p = p_beta_polynomial(beta)?;
    let work = prec + 32;
    let shifted = Rational::from(n + 1) - gamma;
    let log_b = ln_gamma(gamma, work)? + ln_gamma(&shifted, work)?
        - ln_gamma(&Rational::from(n + 1), work)?;
    let value = log_b.exp() * p.eval(gamma, n, work)?;
    Ok(BetaIntegralValue {
        gamma: gamma.clone(),
        beta,
        n,
        value: BigComplex::from_real(Float::with_val(prec, value)),
    })
}

const MAX_LEVEL: u32 = 12;
const T_MAX: f64 = 6.5;

/// Tanh-sinh rule on `(0, 1]`. `f(x, 1-x)` gets both the node and its complement.
fn tanh_sinh(f: &dyn Fn(f64, f64) -> f64, rel_tol: f64) -> Result<(f64, f64)> {
    let node = |t: f64| -> Option<f64> {
        let s = std::f64::consts::PI * t.sinh();
        // x = 1/(1+e^{-s}), 1-x = 1/(1+e^{s})
        let x = 1.0 / (1.0 + (-s).exp());
        let xc = 1.0 / (1.0 + s.exp());
        if x <= 0.0 || xc <= 0.0 {
            return None;
        }
        let w = std::f64::consts::PI * t.cosh() * x * xc;
        let v = f(x, xc) * w;
        v.is_finite().then_some(v)
    };
    let mut h = 1.0;
    let mut sum = node(0.0).unwrap_or(0.0);
    let mut abs_sum = sum.abs();
    let mut k = 1;
    while k as f64 * h <= T_MAX {
        for t in [k as f64 * h, -(k as f64) * h] {
            if let Some(v) = node(t) {
                sum += v;
                abs_sum += v.abs();
            }
        }
        k += 1;
    }
    let mut prev = sum * h;
    for level in 1..=MAX_LEVEL {
        h /= 2.0;
        let mut k = 1;
        while k as f64 * h <= T_MAX {
            for t in [k as f64 * h, -(k as f64) * h] {
                if let Some(v) = node(t) {
                    sum += v;
                    abs_sum += v.abs();
                }
            }
            k += 2;
        }
        let est = sum * h;
        let scale = (abs_sum * h).max(f64::MIN_POSITIVE);
        let diff = (est - prev).abs();
        // the error roughly squares with each level; the last change bounds it
        if diff <= rel_tol * scale * 0.1 || (diff <= rel_tol * scale && level >= 4) {
            return Ok((est, abs_sum * h));
        }
        prev = est;
    }
    Err(Error::NoConvergence(format!(
        "tanh-sinh quadrature did not reach relative {rel_tol:e} within {MAX_LEVEL} levels"
    )))
}

/// Quadrature on `(0,1]` and, after `z → 1/z`, on the tail.
pub fn beta_integral_quad(
    gamma: &Rational,
    beta: u32,
    n: u64,
    rel_tol: f64,
) -> Result<BetaIntegralValue> {
    check_range(gamma, n)?;
    if !(rel_tol >= 1e-12) {
        return Err(Error::InvalidInput(format!(
            "rel_tol must be at least 1e-12, got {rel_tol:e}"
        )));
    }
    let g = gamma.to_f64();
    let m = (n + 1) as f64;
    let b = beta as i32;
    let ln_of = |x: f64, xc: f64| if xc < 0.5 { (-xc).ln_1p() } else { x.ln() };
    // z^{γ-1} (log z)^β (1+z)^{-(n+1)}
    let head = move |z: f64, zc: f64| {
        let l = ln_of(z, zc);
        ((g - 1.0) * l - m * z.ln_1p()).exp() * l.powi(b)
    };
    // u^{n-γ} (-log u)^β (1+u)^{-(n+1)}
    let tail = move |u: f64, uc: f64| {
        let l = ln_of(u, uc);
        ((n as f64 - g) * l - m * u.ln_1p()).exp() * (-l).powi(b)
    };
    let tol = rel_tol / 4.0;
    let (a, _) = tanh_sinh(&head, tol)?;
    let (c, _) = tanh_sinh(&tail, tol)?;
    Ok(BetaIntegralValue {
        gamma: gamma.clone(),
        beta,
        n,
        value: BigComplex::from_f64(a + c, 0.0, 53),
    })
}
