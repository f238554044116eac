use std::cmp::Ordering;
use std::fmt;

use rug::ops::Pow;
use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::exactnum::BigComplex;

/// Index `ω = (α, β)` of the Nilsson monomial `(log n)^β / n^α`.
///
/// The order is the asymptotic one: `ω < ω'` iff `h_ω'(n) / h_ω(n) → 0`,
/// so a larger log power sorts *before* a smaller one at equal `α`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OmegaIndex {
    pub alpha: Rational,
    pub beta: u32,
}

impl OmegaIndex {
    pub fn new(alpha: Rational, beta: u32) -> Self {
        OmegaIndex { alpha, beta }
    }

    pub fn from_ints(num: i64, den: i64, beta: u32) -> Self {
        OmegaIndex {
            alpha: Rational::from((num, den)),
            beta,
        }
    }

    /// Parses `"3/2,0"`.
    pub fn parse(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| Error::InvalidInput(format!("expected 'alpha,beta', got {s:?}")))?;
        let alpha = crate::exactnum::parse_rational(a)?;
        let beta = b
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad log power in {s:?}")))?;
        Ok(OmegaIndex { alpha, beta })
    }

    pub fn shifted(&self, k: u32) -> Self {
        OmegaIndex {
            alpha: Rational::from(&self.alpha + k),
            beta: self.beta,
        }
    }
}

impl Ord for OmegaIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.alpha
            .cmp(&other.alpha)
            .then_with(|| other.beta.cmp(&self.beta))
    }
}

impl PartialOrd for OmegaIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for OmegaIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.alpha, self.beta)
    }
}

pub fn omega_cmp(a: &OmegaIndex, b: &OmegaIndex) -> Ordering {
    a.cmp(b)
}

/// The monomial `h_ω(n) = (log n)^β / n^α`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NilssonMonomial {
    pub index: OmegaIndex,
}

impl NilssonMonomial {
    pub fn new(index: OmegaIndex) -> Self {
        NilssonMonomial { index }
    }

    /// Real value at `n ≥ 2`.
    pub fn eval_real(&self, n: u64, prec: u32) -> Result<Float> {
        if n < 2 {
            return Err(Error::Precondition(format!(
                "monomials are evaluated at n >= 2 (got n = {n})"
            )));
        }
        let work = prec + 16;
        let nf = Float::with_val(work, n);
        let ln = Float::with_val(work, nf.ln_ref());
        let power = if self.index.alpha == 0 {
            Float::with_val(work, 1)
        } else {
            let e = -Float::with_val(work, &self.index.alpha);
            Float::with_val(work, Float::with_val(work, &e * &ln).exp_ref())
        };
        let logs = if self.index.beta == 0 {
            Float::with_val(work, 1)
        } else {
            Float::with_val(work, (&ln).pow(self.index.beta))
        };
        Ok(Float::with_val(prec, power * logs))
    }
}

pub fn monomial_eval(m: &NilssonMonomial, n: u64, prec: u32) -> Result<BigComplex> {
    Ok(BigComplex::from_real(m.eval_real(n, prec)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(n: i64, d: i64, b: u32) -> OmegaIndex {
        OmegaIndex::from_ints(n, d, b)
    }

    #[test]
    fn order_examples() {
        assert_eq!(omega_cmp(&w(1, 1, 1), &w(1, 1, 0)), Ordering::Less);
        assert_eq!(omega_cmp(&w(1, 1, 0), &w(3, 2, 1)), Ordering::Less);
        assert_eq!(omega_cmp(&w(2, 1, 3), &w(2, 1, 3)), Ordering::Equal);
    }

    #[test]
    fn dominance_chain_with_log_terms() {
        // log n/n ≫ 1/n ≫ log n/n^{3/2} ≫ 1/n^{3/2} ≫ log n/n^2
        let chain = [w(1, 1, 1), w(1, 1, 0), w(3, 2, 1), w(3, 2, 0), w(2, 1, 1)];
        for pair in chain.windows(2) {
            assert!(pair[0] < pair[1]);
        }
    }

    #[test]
    fn monomial_values() {
        let one = NilssonMonomial::new(w(0, 1, 0));
        assert_eq!(one.eval_real(17, 64).unwrap(), 1);
        let m = NilssonMonomial::new(w(3, 2, 1));
        let direct = 7f64.ln() / 7f64.powf(1.5);
        let v = m.eval_real(7, 128).unwrap().to_f64();
        assert!((v - direct).abs() < 1e-15);
        let inv = NilssonMonomial::new(w(1, 1, 0)).eval_real(1000, 128).unwrap();
        assert!((inv.to_f64() - 0.001).abs() < 1e-18);
        assert!(one.eval_real(1, 64).is_err());
    }

    #[test]
    fn parses_cut_literals() {
        assert_eq!(OmegaIndex::parse("3/2,0").unwrap(), w(3, 2, 0));
        assert_eq!(OmegaIndex::parse(" 5/2 , 1").unwrap(), w(5, 2, 1));
        assert!(OmegaIndex::parse("3/2").is_err());
    }
}
