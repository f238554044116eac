use rug::Float;

use super::data::SequenceData;
use crate::error::{Error, Result};
use crate::exactnum::BigComplex;
use crate::series::{NilssonMonomial, OmegaIndex};

/// Relative tolerance for `|λ| = r`.
pub const CIRCLE_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct AverageResult {
    /// One coefficient per supplied `λ`.
    pub coefficients: Vec<BigComplex>,
    /// `|c_N - c_{N/2}|` per `λ`.
    pub drift: Vec<f64>,
    /// Whether the drift is within the `O(1/N)` allowance.
    pub converged: Vec<bool>,
    pub note: String,
}

/// Cesàro averages `(1/N) Σ_k a_k r^{-k} h_{ω₀}(k)^{-1} (λ/r)^{-k}`.
pub fn average_extract(
    data: &SequenceData,
    lambdas: &[BigComplex],
    r: &Float,
    leading: &OmegaIndex,
    n: u64,
    prec: u32,
) -> Result<AverageResult> {
    if lambdas.is_empty() {
        return Err(Error::InvalidInput("no frequencies given".into()));
    }
    if *r <= 0 {
        return Err(Error::Precondition("r must be positive".into()));
    }
    let work = prec + 32;
    let r = Float::with_val(work, r);
    let units: Vec<BigComplex> = lambdas
        .iter()
        .map(|l| {
            let l = l.with_prec(work);
            let rel = Float::with_val(work, l.abs() / &r - 1u32).abs().to_f64();
            if rel > CIRCLE_TOLERANCE {
                return Err(Error::Precondition(format!(
                    "|λ| = {} is not on the circle of radius {}",
                    l.abs().to_f64(),
                    r.to_f64()
                )));
            }
            // r/λ
            Ok(l.recip().scale(&r))
        })
        .collect::<Result<_>>()?;
    let start = data.n_min().max(if leading.beta > 0 { 2 } else { 1 });
    if n < start || n > data.n_max() {
        return Err(Error::Precondition(format!(
            "N = {n} must lie in {start}..{}",
            data.n_max()
        )));
    }
    let half = start + (n - start) / 2;
    let h = NilssonMonomial::new(leading.clone());
    let r_inv = Float::with_val(work, r.recip_ref());
    let mut r_pow = (-Float::with_val(work, r.ln_ref()) * Float::with_val(work, start)).exp();
    let mut turn: Vec<BigComplex> = units.iter().map(|u| u.powi(start as i64)).collect();
    let mut sums = vec![BigComplex::zero(work); units.len()];
    let mut at_half = sums.clone();
    let mut count_half = 0u64;
    let mut scale = 0f64;
    for k in start..=n {
        let hk = if k >= 2 {
            h.eval_real(k, work)?
        } else {
            Float::with_val(work, 1)
        };
        let base = data.value(k, work)?.scale(&Float::with_val(work, &r_pow / &hk));
        scale = scale.max(base.abs_f64());
        for ((s, t), u) in sums.iter_mut().zip(turn.iter_mut()).zip(&units) {
            *s = &*s + &(&base * &*t);
            *t = &*t * u;
        }
        r_pow *= &r_inv;
        if k == half {
            at_half = sums.clone();
            count_half = k - start + 1;
        }
    }
    let count = n - start + 1;
    let coefficients: Vec<BigComplex> = sums
        .iter()
        .map(|s| s.scale(&Float::with_val(work, count).recip()).with_prec(prec))
        .collect();
    let mut drift = Vec::new();
    let mut converged = Vec::new();
    for (c, s) in coefficients.iter().zip(&at_half) {
        let ch = s.scale(&Float::with_val(work, count_half).recip());
        let d = (&c.with_prec(work) - &ch).abs_f64();
        drift.push(d);
        converged.push(d <= 8.0 * (c.abs_f64() + scale) / count as f64);
    }
    let note = if converged.iter().all(|&c| c) {
        "averages settled at rate O(1/N)".to_string()
    } else {
        "partial averages drift: the leading index or the frequency set is wrong".to_string()
    };
    Ok(AverageResult {
        coefficients,
        drift,
        converged,
        note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> BigComplex {
        BigComplex::from_f64(re, im, 128)
    }

    #[test]
    fn three_frequencies() {
        // 2 i^n + 3 (-1)^n
        let data = SequenceData::from_fn(0, 4000, |n| {
            let i_pow = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)][(n % 4) as usize].clone();
            let sign = if n % 2 == 0 { 3.0 } else { -3.0 };
            &i_pow.scale(&Float::with_val(128, 2)) + &c(sign, 0.0)
        })
        .unwrap();
        let lambdas = [c(0.0, 1.0), c(-1.0, 0.0), c(1.0, 0.0)];
        let one = Float::with_val(128, 1);
        let res = average_extract(&data, &lambdas, &one, &OmegaIndex::from_ints(0, 1, 0), 4000, 128)
            .unwrap();
        let want = [2.0, 3.0, 0.0];
        for (got, w) in res.coefficients.iter().zip(want) {
            assert!((got - &c(w, 0.0)).abs_f64() <= 5e-3, "{got}");
        }
        assert!(res.converged.iter().all(|&x| x));
    }

    #[test]
    fn single_frequency_is_exact() {
        let data = SequenceData::from_fn(0, 100, |_| c(7.0, 0.0)).unwrap();
        let one = Float::with_val(64, 1);
        let res = average_extract(&data, &[c(1.0, 0.0)], &one, &OmegaIndex::from_ints(0, 1, 0), 100, 64)
            .unwrap();
        assert_eq!(res.coefficients[0].to_f64(), (7.0, 0.0));
    }

    #[test]
    fn missing_log_is_flagged() {
        let data = SequenceData::from_fn(1, 2000, |n| c((n as f64).ln(), 0.0)).unwrap();
        let one = Float::with_val(64, 1);
        let res = average_extract(&data, &[c(1.0, 0.0)], &one, &OmegaIndex::from_ints(0, 1, 0), 2000, 64)
            .unwrap();
        assert!(!res.converged[0]);
        let ok = average_extract(&data, &[c(1.0, 0.0)], &one, &OmegaIndex::from_ints(0, 1, 1), 2000, 64)
            .unwrap();
        assert!(ok.converged[0]);
        assert!((ok.coefficients[0].to_f64().0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn off_circle_rejected() {
        let data = SequenceData::from_fn(0, 10, |_| c(1.0, 0.0)).unwrap();
        let one = Float::with_val(64, 1);
        assert!(average_extract(&data, &[c(1.1, 0.0)], &one, &OmegaIndex::from_ints(0, 1, 0), 10, 64)
            .is_err());
    }
}
