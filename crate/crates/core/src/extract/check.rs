use rug::Float;
use serde_json::{json, Value};

use super::data::SequenceData;
use crate::error::{Error, Result};
use crate::series::{NilssonExpansion, OmegaIndex};

#[derive(Clone, Debug)]
pub struct CheckRow {
    pub cut: OmegaIndex,
    /// The next Ω element, which sets the expected decay.
    pub next: OmegaIndex,
    /// `max |a_n - partial_sum| r^{-n} / h_cut(n)` over the window's upper half.
    pub max_upper_half: f64,
    /// Residual maxima over the first and last eighth of the window.
    pub head_envelope: f64,
    pub tail_envelope: f64,
    pub measured_decay: f64,
    /// `h_next/h_cut` at the head block start over the same at the tail block start.
    pub predicted_decay: f64,
    pub machine_zero: bool,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct CheckReport {
    pub window: (u64, u64),
    pub rows: Vec<CheckRow>,
    pub pass: bool,
}

impl CheckReport {
    pub fn to_value(&self) -> Value {
        json!({
            "window": [self.window.0, self.window.1],
            "pass": self.pass,
            "rows": self.rows.iter().map(|r| json!({
                "cut": r.cut.to_string(),
                "next": r.next.to_string(),
                "max_upper_half": r.max_upper_half,
                "head_envelope": r.head_envelope,
                "tail_envelope": r.tail_envelope,
                "measured_decay": r.measured_decay,
                "predicted_decay": r.predicted_decay,
                "machine_zero": r.machine_zero,
                "status": if r.pass { "PASS" } else { "FAIL" },
            })).collect::<Vec<_>>(),
        })
    }

    /// Plain-text table, one line per cut.
    pub fn table(&self) -> String {
        let mut s = format!(
            "{:<14} {:>12} {:>12} {:>10} {:>10}  status\n",
            "cut", "max(upper)", "tail env", "decay", "expected"
        );
        for r in &self.rows {
            s.push_str(&format!(
                "{:<14} {:>12.4e} {:>12.4e} {:>10.3e} {:>10.3e}  {}\n",
                r.cut.to_string(),
                r.max_upper_half,
                r.tail_envelope,
                r.measured_decay,
                r.predicted_decay,
                if r.machine_zero {
                    "PASS (machine zero)"
                } else if r.pass {
                    "PASS"
                } else {
                    "FAIL"
                }
            ));
        }
        s
    }
}

/// `ln h_ω(n)`.
fn ln_h(w: &OmegaIndex, n: u64) -> f64 {
    let l = (n as f64).ln();
    w.beta as f64 * l.ln() - w.alpha.to_f64() * l
}

/// Residual ladder: for each cut, the scaled remainder must decay across
/// the window at least like the square root of the next monomial ratio.
pub fn check_expansion(
    data: &SequenceData,
    e: &NilssonExpansion,
    cuts: &[OmegaIndex],
    window: (u64, u64),
    prec: u32,
) -> Result<CheckReport> {
    data.check_window(window)?;
    let (lo, hi) = window;
    if lo < 2 {
        return Err(Error::Precondition("check windows start at n >= 2".into()));
    }
    if cuts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("cuts must be strictly ascending in Ω order".into()));
    }
    if hi - lo + 1 < 16 {
        return Err(Error::Precondition("check windows need at least 16 points".into()));
    }
    let work = prec + 32;
    let ln_r = Float::with_val(work, e.r()?.ln_ref());
    let values: Vec<(u64, rug::Float, rug::Float)> = (lo..=hi)
        .map(|n| {
            let scale = (-Float::with_val(work, &ln_r * n)).exp();
            Ok((n, Float::with_val(work, scale), data.value(n, work)?.abs()))
        })
        .collect::<Result<_>>()?;
    let len = values.len();
    let block = (len / 8).max(1);
    let mid = lo + (hi - lo) / 2;
    let tiny = 2f64.powi(-(prec.min(2000) as i32) / 2);
    let mut rows = Vec::new();
    for cut in cuts {
        let next = e.next_omega(cut).unwrap_or_else(|| cut.shifted(1));
        let mut resid = Vec::with_capacity(len);
        let mut data_scale = 0f64;
        for (n, scale, abs) in &values {
            let approx = e.partial_sum(cut, *n, work)?;
            let diff = (&data.value(*n, work)? - &approx).abs() * scale;
            let inv_h = (-ln_h(cut, *n)).exp();
            resid.push(diff.to_f64() * inv_h);
            data_scale = data_scale.max(Float::with_val(work, abs * scale).to_f64() * inv_h);
        }
        let max_upper_half = values
            .iter()
            .zip(&resid)
            .filter(|((n, _, _), _)| *n >= mid)
            .map(|(_, r)| *r)
            .fold(0.0, f64::max);
        let head_envelope = resid[..block].iter().cloned().fold(0.0, f64::max);
        let tail_envelope = resid[len - block..].iter().cloned().fold(0.0, f64::max);
        // block starts, where a decaying envelope peaks
        let head_n = values[0].0;
        let tail_n = values[len - block].0;
        let gap = |n| ln_h(&next, n) - ln_h(cut, n);
        let predicted_decay = (gap(head_n) - gap(tail_n)).exp();
        let measured_decay = head_envelope / tail_envelope;
        let all_max = resid.iter().cloned().fold(0.0, f64::max);
        let machine_zero = all_max <= tiny * data_scale.max(f64::MIN_POSITIVE);
        let pass = machine_zero
            || (measured_decay > 1.0 && measured_decay >= predicted_decay.sqrt());
        rows.push(CheckRow {
            cut: cut.clone(),
            next,
            max_upper_half,
            head_envelope,
            tail_envelope,
            measured_decay,
            predicted_decay,
            machine_zero,
            pass,
        });
    }
    let pass = rows.iter().all(|r| r.pass);
    Ok(CheckReport { window, rows, pass })
}
