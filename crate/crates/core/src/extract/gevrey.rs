use crate::error::{Error, Result};
use crate::series::TruncatedSeries;

#[derive(Clone, Debug)]
pub struct GevreyReport {
    /// `max_{2≤k≤K} (|g_k|/k!)^{1/k}`.
    pub c: f64,
    /// `(k, (|g_k|/k!)^{1/k})`.
    pub per_k: Vec<(usize, f64)>,
    /// Whether the per-k estimates are nondecreasing.
    pub increasing: bool,
    pub note: String,
}

fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|j| (j as f64).ln()).sum()
}

/// Estimate of `C` in `|g_k| ≤ C^k k!`.
pub fn gevrey_diagnostic(g: &TruncatedSeries, embedding: usize) -> Result<GevreyReport> {
    let order = g.order();
    if order < 4 {
        return Err(Error::Precondition(format!(
            "the Gevrey estimate needs K >= 4, got K = {order}"
        )));
    }
    let mut per_k = Vec::new();
    for (k, c) in g.coeffs().iter().enumerate().skip(2) {
        let z = c.to_complex(embedding, 128)?;
        let v = if z.is_zero() {
            0.0
        } else {
            let ln_abs = rug::Float::with_val(128, z.abs().ln_ref()).to_f64();
            ((ln_abs - ln_factorial(k)) / k as f64).exp()
        };
        per_k.push((k, v));
    }
    let c = per_k.iter().map(|p| p.1).fold(0.0, f64::max);
    let increasing = per_k.windows(2).all(|w| w[1].1 >= w[0].1);
    let decreasing = per_k.windows(2).all(|w| w[1].1 <= w[0].1);
    let note = if increasing {
        "estimates still increasing with k: C may be underestimated".to_string()
    } else if decreasing {
        "estimates decrease with k: coefficients grow slower than k!".to_string()
    } else {
        "estimates not monotone in k".to_string()
    };
    Ok(GevreyReport {
        c,
        per_k,
        increasing,
        note,
    })
}
