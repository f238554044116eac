use super::data::SequenceData;
use crate::error::{Error, Result};

/// Ratio of the half-window estimates beyond which a trend is reported.
pub const TREND_TOLERANCE: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trend {
    Stable,
    Decaying,
    Growing,
}

#[derive(Clone, Debug)]
pub struct GrowthEstimate {
    /// Envelope fit `ln|a_n| ≈ c + n ln r - α ln n`; the primary estimate.
    pub r: f64,
    /// `max |a_n|^{1/n}` over the window.
    pub r_max: f64,
    /// `α` of the envelope fit.
    pub alpha: f64,
    /// Envelope estimates on the two window halves.
    pub halves: (f64, f64),
    /// `max |a_n|^{1/n}` on the two halves.
    pub halves_max: (f64, f64),
    pub trend: Trend,
    pub note: String,
}

/// Least squares on a few well-scaled columns by modified Gram-Schmidt.
fn small_lstsq(cols: &[Vec<f64>], y: &[f64]) -> Option<Vec<f64>> {
    let p = cols.len();
    let mut q: Vec<Vec<f64>> = cols.to_vec();
    let mut r = vec![vec![0.0; p]; p];
    for j in 0..p {
        for i in 0..j {
            let d: f64 = q[i].iter().zip(&q[j]).map(|(a, b)| a * b).sum();
            r[i][j] = d;
            let qi = q[i].clone();
            for (x, a) in q[j].iter_mut().zip(&qi) {
                *x -= d * a;
            }
        }
        let norm = q[j].iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return None;
        }
        r[j][j] = norm;
        for x in q[j].iter_mut() {
            *x /= norm;
        }
    }
    let qty: Vec<f64> = q.iter().map(|c| c.iter().zip(y).map(|(a, b)| a * b).sum()).collect();
    let mut x = vec![0.0; p];
    for j in (0..p).rev() {
        let s: f64 = (j + 1..p).map(|k| r[j][k] * x[k]).sum();
        x[j] = (qty[j] - s) / r[j][j];
    }
    Some(x)
}

/// `(r, α)` from block maxima of `ln|a_n|`; oscillating factors then sit
/// near their peaks.
fn envelope_fit(points: &[(u64, f64)]) -> Option<(f64, f64)> {
    let len = points.len();
    let block = (len / 8).clamp(1, 16);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for chunk in points.chunks(block) {
        if chunk.len() < block && !xs.is_empty() {
            break;
        }
        let best = chunk
            .iter()
            .filter(|p| p.1.is_finite())
            .max_by(|a, b| a.1.total_cmp(&b.1))?;
        xs.push(best.0 as f64);
        ys.push(best.1);
    }
    if xs.len() < 3 {
        return None;
    }
    let center = xs.iter().sum::<f64>() / xs.len() as f64;
    let scale = xs.iter().map(|x| (x - center).abs()).fold(0.0, f64::max).max(1.0);
    let ones = vec![1.0; xs.len()];
    let lin: Vec<f64> = xs.iter().map(|x| (x - center) / scale).collect();
    let logs: Vec<f64> = xs.iter().map(|x| x.max(1.0).ln()).collect();
    let has_log = xs.len() >= 4 && xs[0] >= 1.0;
    let cols = if has_log {
        vec![ones, lin, logs]
    } else {
        vec![ones, lin]
    };
    let c = small_lstsq(&cols, &ys)?;
    let alpha = if has_log { -c[2] } else { 0.0 };
    Some(((c[1] / scale).exp(), alpha))
}

fn raw_max(points: &[(u64, f64)]) -> f64 {
    points
        .iter()
        .filter(|(n, l)| *n > 0 && l.is_finite())
        .map(|(n, l)| l / *n as f64)
        .fold(f64::NEG_INFINITY, f64::max)
        .exp()
}

pub fn estimate_growth(data: &SequenceData, window: (u64, u64)) -> Result<GrowthEstimate> {
    data.check_window(window)?;
    let points: Vec<(u64, f64)> = (window.0..=window.1)
        .map(|n| Ok((n, data.ln_abs(n)?)))
        .collect::<Result<_>>()?;
    if points.iter().all(|p| !p.1.is_finite()) {
        return Err(Error::Precondition(
            "all values in the window are zero".into(),
        ));
    }
    let mid = points.len() / 2;
    let (first, second) = points.split_at(mid.max(1));
    let r_max = raw_max(&points);
    let halves_max = (raw_max(first), raw_max(second));
    let whole = envelope_fit(&points);
    let halves = match (envelope_fit(first), envelope_fit(second)) {
        (Some(a), Some(b)) => (a.0, b.0),
        _ => halves_max,
    };
    let (r, alpha) = whole.unwrap_or((r_max, 0.0));
    let ratio = halves.1 / halves.0;
    let (trend, note) = if !(ratio.is_finite()) || ratio < 1.0 - TREND_TOLERANCE {
        (
            Trend::Decaying,
            "estimates decay across the window: limsup ≈ 0, not Nilsson-representable".to_string(),
        )
    } else if ratio > 1.0 + TREND_TOLERANCE {
        (
            Trend::Growing,
            "estimates grow across the window: super-exponential growth, not Nilsson-representable"
                .to_string(),
        )
    } else {
        (
            Trend::Stable,
            format!("half-window estimates agree within {TREND_TOLERANCE}"),
        )
    };
    Ok(GrowthEstimate {
        r,
        r_max,
        alpha,
        halves,
        halves_max,
        trend,
        note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::ops::Pow;
    use rug::{Integer, Rational};

    #[test]
    fn two_geometric_terms() {
        let vals = (0..=100u32)
            .map(|n| Rational::from(Integer::from(2).pow(n) + Integer::from(3).pow(n)))
            .collect();
        let d = SequenceData::from_rationals(0, vals).unwrap();
        let g = estimate_growth(&d, (50, 100)).unwrap();
        assert!((g.r - 3.0).abs() < 1e-2, "{g:?}");
        assert!((g.r_max - 3.0).abs() < 1e-2);
        assert_eq!(g.trend, Trend::Stable);
    }

    #[test]
    fn polynomial_factor_does_not_bias_envelope() {
        // 2^n n^{-10}
        let vals = (1..=400u32)
            .map(|n| Rational::from((Integer::from(2).pow(n), Integer::from(n).pow(10))))
            .collect();
        let d = SequenceData::from_rationals(1, vals).unwrap();
        let g = estimate_growth(&d, (200, 400)).unwrap();
        assert!((g.r - 2.0).abs() < 1e-6, "{g:?}");
        assert!((g.alpha - 10.0).abs() < 1e-3);
        assert!(g.r_max < 1.95);
        assert_eq!(g.trend, Trend::Stable);
    }

    #[test]
    fn inverse_factorial_decays() {
        let mut f = Integer::from(1);
        let mut vals = vec![Rational::from(1)];
        for n in 1..=40u32 {
            f *= n;
            vals.push(Rational::from((1, f.clone())));
        }
        let d = SequenceData::from_rationals(0, vals).unwrap();
        let g = estimate_growth(&d, (20, 40)).unwrap();
        assert_eq!(g.trend, Trend::Decaying, "{g:?}");
        assert!(g.note.contains("limsup ≈ 0"));
    }

    #[test]
    fn factorial_grows() {
        let mut f = Integer::from(1);
        let mut vals = vec![Rational::from(1)];
        for n in 1..=60u32 {
            f *= n;
            vals.push(Rational::from(f.clone()));
        }
        let d = SequenceData::from_rationals(0, vals).unwrap();
        assert_eq!(estimate_growth(&d, (20, 60)).unwrap().trend, Trend::Growing);
    }

    #[test]
    fn errors() {
        let d = SequenceData::from_rationals(0, vec![Rational::new(); 10]).unwrap();
        assert!(estimate_growth(&d, (2, 9)).is_err());
        assert!(estimate_growth(&d, (5, 3)).is_err());
        assert!(estimate_growth(&d, (5, 30)).is_err());
    }
}
