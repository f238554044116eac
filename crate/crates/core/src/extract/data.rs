use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::exactnum::{BigComplex, Coeff, NfElem};
use crate::io::Values;

/// A sequence `a_{n_min}, a_{n_min+1}, ...` with exact or numeric entries.
#[derive(Clone, Debug)]
pub struct SequenceData {
    n_min: u64,
    values: Values,
    embedding: usize,
}

impl SequenceData {
    pub fn new(n_min: u64, values: Values, embedding: usize) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "a sequence needs at least two values, got {}",
                values.len()
            )));
        }
        Ok(SequenceData {
            n_min,
            values,
            embedding,
        })
    }

    pub fn from_rationals(n_min: u64, values: Vec<Rational>) -> Result<Self> {
        Self::new(
            n_min,
            Values::Exact(values.into_iter().map(NfElem::rational).collect()),
            0,
        )
    }

    pub fn from_exact(n_min: u64, values: Vec<NfElem>, embedding: usize) -> Result<Self> {
        Self::new(n_min, Values::Exact(values), embedding)
    }

    pub fn from_complex(n_min: u64, values: Vec<BigComplex>) -> Result<Self> {
        Self::new(n_min, Values::Numeric(values), 0)
    }

    /// Samples `f(n)` for `n` in `n_min..=n_max`.
    pub fn from_fn(
        n_min: u64,
        n_max: u64,
        mut f: impl FnMut(u64) -> BigComplex,
    ) -> Result<Self> {
        Self::from_complex(n_min, (n_min..=n_max).map(&mut f).collect())
    }

    pub fn n_min(&self) -> u64 {
        self.n_min
    }

    /// Last index with a value.
    pub fn n_max(&self) -> u64 {
        self.n_min + self.values.len() as u64 - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.values, Values::Exact(_))
    }

    pub fn values(&self) -> &Values {
        &self.values
    }

    pub fn embedding(&self) -> usize {
        self.embedding
    }

    pub fn exact(&self, n: u64) -> Option<&NfElem> {
        match &self.values {
            Values::Exact(v) => v.get(n.checked_sub(self.n_min)? as usize),
            Values::Numeric(_) => None,
        }
    }

    pub fn value(&self, n: u64, prec: u32) -> Result<BigComplex> {
        let i = n
            .checked_sub(self.n_min)
            .map(|i| i as usize)
            .filter(|&i| i < self.values.len())
            .ok_or_else(|| {
                Error::Precondition(format!(
                    "n = {n} outside the data range {}..{}",
                    self.n_min,
                    self.n_max()
                ))
            })?;
        match &self.values {
            Values::Exact(v) => Coeff::Exact(v[i].clone()).to_complex(self.embedding, prec),
            Values::Numeric(v) => Ok(v[i].with_prec(prec)),
        }
    }

    /// `ln |a_n|`, `-inf` for zero.
    pub fn ln_abs(&self, n: u64) -> Result<f64> {
        let z = self.value(n, 64)?;
        if z.is_zero() {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(Float::with_val(64, z.abs().ln_ref()).to_f64())
    }

    /// Checks that `lo..=hi` is a nonempty subrange of the data.
    pub fn check_window(&self, window: (u64, u64)) -> Result<()> {
        let (lo, hi) = window;
        if lo > hi {
            return Err(Error::InvalidInput(format!("empty window {lo}:{hi}")));
        }
        if lo < self.n_min || hi > self.n_max() {
            return Err(Error::Precondition(format!(
                "window {lo}:{hi} is not inside the data range {}..{}",
                self.n_min,
                self.n_max()
            )));
        }
        Ok(())
    }
}
