use rug::{Integer, Rational};

use crate::error::{Error, Result};

/// Growth of a rational sequence and of its common denominators.
#[derive(Clone, Debug, PartialEq)]
pub struct GReport {
    /// `max |a_n|^{1/n}` over the window.
    pub size_c: f64,
    /// `max lcm(den a_0..a_n)^{1/n}` over the window.
    pub denom_c: f64,
    /// The two statistics on the first and second half of the window.
    pub size_halves: (f64, f64),
    pub denom_halves: (f64, f64),
    pub g_compatible: bool,
    pub note: String,
}

/// Natural logarithm of a positive big integer.
pub(crate) fn ln_integer(x: &Integer) -> f64 {
    let (m, e) = x.to_f64_exp();
    m.abs().ln() + e as f64 * std::f64::consts::LN_2
}

pub(crate) fn ln_abs_rational(x: &Rational) -> f64 {
    if *x == 0 {
        return f64::NEG_INFINITY;
    }
    ln_integer(x.numer()) - ln_integer(x.denom())
}

fn stable(h: (f64, f64)) -> bool {
    let (a, b) = h;
    if !(a.is_finite() && b.is_finite()) || a <= 0.0 || b <= 0.0 {
        return a == b && a.is_finite();
    }
    a.max(b) / a.min(b) <= 1.2
}

/// `values[i]` is `a_{n_min + i}`; the window is an inclusive `n`-range.
pub fn gfunction_diagnostic(values: &[Rational], n_min: u64, window: (u64, u64)) -> Result<GReport> {
    let (lo, hi) = window;
    let n_max = n_min + values.len() as u64;
    if lo > hi || lo < n_min || hi >= n_max {
        return Err(Error::Precondition(format!(
            "window {lo}..{hi} is not inside the data range {n_min}..{}",
            n_max.saturating_sub(1)
        )));
    }
    let mid = lo + (hi - lo) / 2;
    let mut lcm = Integer::from(1);
    let mut size = [f64::NEG_INFINITY; 2];
    let mut denom = [f64::NEG_INFINITY; 2];
    for (i, v) in values.iter().enumerate() {
        let n = n_min + i as u64;
        if n > hi {
            break;
        }
        lcm.lcm_mut(v.denom());
        if n < lo || n == 0 {
            continue;
        }
        let half = usize::from(n > mid);
        let s = ln_abs_rational(v) / n as f64;
        let d = ln_integer(&lcm) / n as f64;
        size[half] = size[half].max(s);
        denom[half] = denom[half].max(d);
    }
    let size_halves = (size[0].exp(), size[1].exp());
    let denom_halves = (denom[0].exp(), denom[1].exp());
    let size_c = size_halves.0.max(size_halves.1);
    let denom_c = denom_halves.0.max(denom_halves.1);
    let finite = size_c.is_finite() && denom_c.is_finite();
    let g_compatible = finite && stable(size_halves) && stable(denom_halves);
    let note = if g_compatible {
        "G-function-compatible growth".to_string()
    } else if !stable(size_halves) {
        "size estimate drifts between window halves: not G-function growth".to_string()
    } else {
        "denominator estimate drifts between window halves: not G-function growth".to_string()
    };
    Ok(GReport {
        size_c,
        denom_c,
        size_halves,
        denom_halves,
        g_compatible,
        note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorials_are_not_g() {
        let mut vals = vec![Rational::from(1)];
        for n in 1..=60u32 {
            vals.push(Rational::from(Integer::from(Integer::factorial(n))));
        }
        let r = gfunction_diagnostic(&vals, 0, (10, 60)).unwrap();
        assert!(!r.g_compatible, "{r:?}");
        assert!(r.size_halves.1 > 1.2 * r.size_halves.0);
    }

    #[test]
    fn harmonic_denominators_grow_like_e() {
        let vals: Vec<Rational> = (0..=1500).map(|n| Rational::from((1, n + 1))).collect();
        let r = gfunction_diagnostic(&vals, 0, (800, 1500)).unwrap();
        assert!((r.denom_c - std::f64::consts::E).abs() < 0.15, "{r:?}");
        assert!(r.g_compatible);
    }

    #[test]
    fn window_outside_data() {
        let vals = vec![Rational::from(1); 5];
        assert!(gfunction_diagnostic(&vals, 0, (2, 9)).is_err());
    }
}
