use rug::ops::Pow;
use rug::{Complete, Float, Integer, Rational};

use super::bernoulli::bernoulli_numbers;
use crate::error::{Error, Result};
use crate::exactnum::BigComplex;

/// Bits of headroom carried through the shift recursion and the tail.
const GUARD: u32 = 32;

fn check_positive(x: &Rational, what: &str) -> Result<()> {
    if *x <= 0 {
        return Err(Error::InvalidInput(format!(
            "{what} needs a positive argument, got {x}"
        )));
    }
    Ok(())
}

/// Argument from which the asymptotic tail is used.
fn threshold(prec: u32, k: u32) -> u32 {
    (prec / 2 + k).max(16)
}

fn shift_count(x: &Rational, big: u32) -> u32 {
    if *x >= big {
        0
    } else {
        let gap = Rational::from(big) - x;
        let (_, ceil) = gap.fract_ceil(Integer::new());
        ceil.to_u32().unwrap_or(big)
    }
}

/// Sums `Σ_{j≥1} term(j)` until a term drops below `2^{-prec}` of the total.
fn asymptotic_tail(prec: u32, scale: &Float, mut term: impl FnMut(usize, &[Rational]) -> Float) -> Float {
    let mut count = 64;
    loop {
        let b = bernoulli_numbers(2 * count);
        let mut sum = Float::with_val(prec, 0);
        let mut last = f64::INFINITY;
        for j in 1..=count {
            let t = term(j, &b);
            let size = t.clone().abs();
            let rel = if scale.is_zero() {
                size.to_f64()
            } else {
                Float::with_val(prec, &size / scale).to_f64()
            };
            sum += t;
            if rel < f64::powi(2.0, -(prec as i32)) {
                return sum;
            }
            if rel > last {
                break;
            }
            last = rel;
        }
        if count >= 1024 {
            return sum;
        }
        count *= 2;
    }
}

/// `ψ^{(k)}(x)` for rational `x > 0`.
pub fn polygamma(k: u32, x: &Rational, prec: u32) -> Result<BigComplex> {
    check_positive(x, "polygamma")?;
    Ok(BigComplex::from_real(polygamma_real(k, x, prec)))
}

pub(crate) fn polygamma_real(k: u32, x: &Rational, prec: u32) -> Float {
    let work = prec + GUARD;
    let n_shift = shift_count(x, threshold(work, k));
    let big = Rational::from(x + n_shift);
    let xf = Float::with_val(work, &big);
    let inv = Float::with_val(work, xf.recip_ref());
    let inv2 = Float::with_val(work, inv.square_ref());
    let kf = Integer::factorial(k).complete();
    let head = if k == 0 {
        Float::with_val(work, xf.ln_ref()) - Float::with_val(work, &inv / 2u32)
    } else {
        // (k-1)!/x^k + k!/(2 x^{k+1})
        let km1 = Integer::factorial(k - 1).complete();
        let ipk = Float::with_val(work, inv.clone().pow(k));
        Float::with_val(work, &ipk * &km1) + Float::with_val(work, &ipk * &inv) * &kf / 2u32
    };
    let scale = head.clone().abs();
    let mut power = Float::with_val(work, inv.clone().pow(k));
    let tail = asymptotic_tail(work, &scale, |j, b| {
        power *= &inv2;
        let two_j = 2 * j as u32;
        let c = if k == 0 {
            Rational::from(&b[2 * j] / two_j)
        } else {
            // B_{2j} (2j+k-1)! / (2j)!
            let ratio = Integer::factorial(two_j + k - 1).complete()
                / Integer::factorial(two_j).complete();
            Rational::from(&b[2 * j] * ratio)
        };
        Float::with_val(work, &power * &c)
    });
    let mut at_big = if k == 0 { head - tail } else { head + tail };
    if k % 2 == 0 && k > 0 {
        at_big = -at_big;
    }
    // ψ^{(k)}(x) = ψ^{(k)}(x+N) - (-1)^k k! Σ_{j<N} (x+j)^{-(k+1)}
    if n_shift > 0 {
        let mut s = Rational::new();
        for j in 0..n_shift {
            let t = Rational::from(x + j);
            s += Rational::from(t.recip()).pow(k + 1);
        }
        let corr = Float::with_val(work, &s) * &kf;
        if k % 2 == 0 {
            at_big -= corr;
        } else {
            at_big += corr;
        }
    }
    Float::with_val(prec, at_big)
}

/// `log Γ(x)` for rational `x > 0`.
pub fn ln_gamma(x: &Rational, prec: u32) -> Result<Float> {
    check_positive(x, "ln_gamma")?;
    let work = prec + GUARD;
    let n_shift = shift_count(x, threshold(work, 0));
    let big = Rational::from(x + n_shift);
    let xf = Float::with_val(work, &big);
    let inv = Float::with_val(work, xf.recip_ref());
    let inv2 = Float::with_val(work, inv.square_ref());
    let two_pi = BigComplex::pi(work) * 2u32;
    let head = Float::with_val(work, &xf - 0.5f64) * Float::with_val(work, xf.ln_ref()) - &xf
        + Float::with_val(work, two_pi.ln()) / 2u32;
    let scale = head.clone().abs();
    let mut power = Float::with_val(work, &inv / &inv2);
    let tail = asymptotic_tail(work, &scale, |j, b| {
        power *= &inv2;
        let j = j as u32;
        let c = Rational::from(&b[2 * j as usize] / (2 * j * (2 * j - 1)));
        Float::with_val(work, &power * &c)
    });
    let mut out = head + tail;
    if n_shift > 0 {
        let mut prod = Rational::from(1);
        for j in 0..n_shift {
            prod *= Rational::from(x + j);
        }
        out -= Float::with_val(work, &prod).ln();
    }
    Ok(Float::with_val(prec, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::float::Constant;

    fn rel(a: &Float, b: &Float) -> f64 {
        let d = Float::with_val(a.prec(), a - b);
        if b.is_zero() {
            d.abs().to_f64()
        } else {
            (d / b).abs().to_f64()
        }
    }

    #[test]
    fn digamma_at_one_is_minus_euler() {
        for prec in [64, 256, 512] {
            let v = polygamma_real(0, &Rational::from(1), prec);
            let euler = -Float::with_val(prec, Constant::Euler);
            assert!(rel(&v, &euler) < f64::powi(2.0, 8 - prec as i32), "prec {prec}");
        }
    }

    #[test]
    fn trigamma_at_one_is_zeta_two() {
        let prec = 256;
        let v = polygamma_real(1, &Rational::from(1), prec);
        let pi = Float::with_val(prec, Constant::Pi);
        let want = Float::with_val(prec, pi.square_ref()) / 6u32;
        assert!(rel(&v, &want) < 1e-70);
    }

    #[test]
    fn higher_orders_match_zeta() {
        // ψ^{(k)}(1) = (-1)^{k+1} k! ζ(k+1)
        let prec = 200;
        for k in 1..=7u32 {
            let v = polygamma_real(k, &Rational::from(1), prec);
            let z = Float::with_val(prec, Float::with_val(prec, k + 1).zeta())
                * Integer::factorial(k).complete();
            let want = if k % 2 == 1 { z } else { -z };
            assert!(rel(&v, &want) < 1e-55, "k = {k}");
        }
    }

    #[test]
    fn digamma_matches_mpfr_and_recurrence() {
        let prec = 128;
        for (p, q) in [(1, 3), (7, 2), (1000, 7), (3, 1000)] {
            let x = Rational::from((p, q));
            let v = polygamma_real(0, &x, prec);
            let want = Float::with_val(prec, &x).digamma();
            assert!(rel(&v, &want) < 1e-35, "x = {x}");
            let next = polygamma_real(0, &Rational::from(&x + 1u32), prec);
            let step = Float::with_val(prec, next - v);
            let inv = Float::with_val(prec, Rational::from(x.recip_ref()));
            assert!(rel(&step, &inv) < 1e-30);
        }
        let two = polygamma_real(0, &Rational::from(2), prec);
        let one = polygamma_real(0, &Rational::from(1), prec);
        assert!(rel(&Float::with_val(prec, two - one), &Float::with_val(prec, 1)) < 1e-36);
    }

    #[test]
    fn ln_gamma_matches_mpfr() {
        let prec = 256;
        for (p, q) in [(1, 2), (1, 3), (5, 1), (10001, 3), (1, 1000)] {
            let x = Rational::from((p, q));
            let v = ln_gamma(&x, prec).unwrap();
            let want = Float::with_val(prec, &x).ln_gamma();
            let d = Float::with_val(prec, v - want).abs().to_f64();
            assert!(d < 1e-70, "x = {x}: {d}");
        }
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(polygamma(0, &Rational::new(), 64).is_err());
        assert!(ln_gamma(&Rational::from(-1), 64).is_err());
    }
}
