use std::collections::BTreeMap;

use rug::{Float, Integer, Rational};

use super::omega::{NilssonMonomial, OmegaIndex};
use crate::error::{Error, Result};
use crate::exactnum::{lift_pair, BigComplex, Coeff};

/// A power series `Σ_{k≤K} g_k x^k` truncated at order `K`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries {
    coeffs: Vec<Coeff>,
    normalized: bool,
}

impl TruncatedSeries {
    pub fn new(coeffs: Vec<Coeff>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("series needs at least one coefficient".into()));
        }
        Ok(TruncatedSeries {
            coeffs,
            normalized: false,
        })
    }

    /// A g-series with leading coefficient exactly 1.
    pub fn normalized(coeffs: Vec<Coeff>) -> Result<Self> {
        let s = TruncatedSeries::new(coeffs)?;
        let lead_is_one = match &s.coeffs[0] {
            Coeff::Exact(x) => x.as_rational().is_some_and(|r| *r == 1),
            Coeff::Numeric(z) => *z.re() == 1 && z.im().is_zero(),
        };
        if !lead_is_one {
            return Err(Error::InvalidInput(
                "normalized series must start with coefficient 1".into(),
            ));
        }
        Ok(TruncatedSeries {
            normalized: true,
            ..s
        })
    }

    pub fn one() -> Self {
        TruncatedSeries {
            coeffs: vec![Coeff::rational(Rational::from(1))],
            normalized: true,
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Coeff] {
        &self.coeffs
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn truncate(&self, k: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.truncate(k + 1);
        TruncatedSeries {
            coeffs: c,
            normalized: self.normalized,
        }
    }
}

/// One branch `S · λⁿ · (log n)^β n^{-α} · g(1/n)` of an expansion.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionTerm {
    pub lambda_index: usize,
    pub alpha: Rational,
    pub beta: u32,
    pub stokes: Coeff,
    pub g: TruncatedSeries,
}

impl ExpansionTerm {
    pub fn index(&self) -> OmegaIndex {
        OmegaIndex::new(self.alpha.clone(), self.beta)
    }
}

/// The factored expansion `Σ_λ λⁿ Σ_{α,β} S_{λ,α,β} h_{(α,β)}(n) g_{λ,α,β}(1/n)`.
///
/// `Ω` is kept implicitly as `(S, d)`; only the stored rows are explicit.
#[derive(Clone, Debug)]
pub struct NilssonExpansion {
    lambdas: Vec<Coeff>,
    terms: Vec<ExpansionTerm>,
    d: u32,
    base: Vec<Rational>,
    embedding: usize,
    prec: u32,
}

pub const DEFAULT_PRECISION: u32 = 256;

fn frac(a: &Rational) -> Rational {
    let fl = Integer::from(a.floor_ref());
    Rational::from(a - fl)
}

/// `|x - y| <= tol * max(|x|, |y|, tiny)`.
pub(crate) fn close(x: &BigComplex, y: &BigComplex, tol: f64) -> bool {
    let diff = (x - y).abs_f64();
    let scale = x.abs_f64().max(y.abs_f64());
    if scale == 0.0 {
        return diff == 0.0;
    }
    diff <= tol * scale
}

impl NilssonExpansion {
    /// Builds an expansion, deriving `S` and `d` from the stored terms.
    pub fn new(
        lambdas: Vec<Coeff>,
        terms: Vec<ExpansionTerm>,
        embedding: usize,
        prec: u32,
    ) -> Result<Self> {
        let mut base: Vec<Rational> = Vec::new();
        let mut d = 0;
        for t in &terms {
            d = d.max(t.beta);
            match base.iter_mut().find(|s| frac(s) == frac(&t.alpha)) {
                Some(s) => {
                    if t.alpha < *s {
                        *s = t.alpha.clone();
                    }
                }
                None => base.push(t.alpha.clone()),
            }
        }
        base.sort();
        Self::with_omega(lambdas, terms, d, base, embedding, prec)
    }

    /// Builds an expansion with an explicit `Ω = (S + ℕ) × {0..d}`.
    pub fn with_omega(
        lambdas: Vec<Coeff>,
        terms: Vec<ExpansionTerm>,
        d: u32,
        mut base: Vec<Rational>,
        embedding: usize,
        prec: u32,
    ) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(Error::InvalidInput("expansion has no growth rates".into()));
        }
        base.sort();
        base.dedup();
        let e = NilssonExpansion {
            lambdas,
            terms,
            d,
            base,
            embedding,
            prec: prec.max(64),
        };
        for t in &e.terms {
            if t.lambda_index >= e.lambdas.len() {
                return Err(Error::InvalidInput(format!(
                    "term refers to growth rate #{} but only {} are given",
                    t.lambda_index,
                    e.lambdas.len()
                )));
            }
            if !e.contains(&t.index()) {
                return Err(Error::InvalidInput(format!(
                    "term index {} lies outside Omega",
                    t.index()
                )));
            }
        }
        e.check_equal_modulus()?;
        Ok(e)
    }

    fn check_equal_modulus(&self) -> Result<()> {
        let exact: Option<Vec<Rational>> = self
            .lambdas
            .iter()
            .map(|l| l.as_exact().and_then(|x| x.modulus_squared_exact()))
            .collect();
        if let Some(m) = exact {
            if m.iter().any(|x| *x != m[0]) {
                return Err(Error::Precondition(
                    "growth rates must all have the same modulus".into(),
                ));
            }
            if m[0] == 0 {
                return Err(Error::Precondition("growth rate 0 is not allowed".into()));
            }
            return Ok(());
        }
        let tol = 2f64.powi(-(self.prec.min(1000) as i32) / 2).max(1e-30);
        let mods: Vec<Float> = self
            .lambdas
            .iter()
            .map(|l| l.to_complex(self.embedding, self.prec).map(|z| z.abs()))
            .collect::<Result<_>>()?;
        if mods[0].is_zero() {
            return Err(Error::Precondition("growth rate 0 is not allowed".into()));
        }
        for m in &mods[1..] {
            let rel = Float::with_val(self.prec, m - &mods[0]).to_f64().abs() / mods[0].to_f64();
            if rel > tol {
                return Err(Error::Precondition(
                    "growth rates must all have the same modulus".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn lambdas(&self) -> &[Coeff] {
        &self.lambdas
    }

    pub fn terms(&self) -> &[ExpansionTerm] {
        &self.terms
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn base(&self) -> &[Rational] {
        &self.base
    }

    pub fn embedding(&self) -> usize {
        self.embedding
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// The common modulus `r` of the growth rates.
    pub fn r(&self) -> Result<Float> {
        Ok(self.lambdas[0].to_complex(self.embedding, self.prec)?.abs())
    }

    pub fn contains(&self, w: &OmegaIndex) -> bool {
        w.beta <= self.d
            && self.base.iter().any(|s| {
                let diff = Rational::from(&w.alpha - s);
                *diff.denom() == 1 && diff >= 0
            })
    }

    /// Smallest element of `Ω` strictly greater than `w`.
    pub fn next_omega(&self, w: &OmegaIndex) -> Option<OmegaIndex> {
        if w.beta > 0 {
            return Some(OmegaIndex::new(w.alpha.clone(), w.beta - 1));
        }
        self.base
            .iter()
            .filter_map(|s| {
                let diff = Rational::from(&w.alpha - s);
                let steps = if diff < 0 {
                    Integer::from(0)
                } else {
                    Integer::from(diff.floor_ref()) + 1
                };
                let a = Rational::from(s + steps);
                (a > w.alpha).then_some(a)
            })
            .min()
            .map(|a| OmegaIndex::new(a, self.d))
    }

    /// Flattened view `c_{(α+k,β),λ} = S_{λ,α,β}·g_k`; overlapping cells are summed.
    pub fn to_matrix(&self) -> Result<CoefficientMatrix> {
        let cols = self.lambdas.len();
        let mut rows: BTreeMap<OmegaIndex, Vec<Option<Coeff>>> = BTreeMap::new();
        for t in &self.terms {
            for (k, gk) in t.g.coeffs().iter().enumerate() {
                if gk.is_zero() {
                    continue;
                }
                let cell = t.index().shifted(k as u32);
                let v = t.stokes.mul(gk, self.embedding, self.prec)?;
                let row = rows.entry(cell).or_insert_with(|| vec![None; cols]);
                let slot = &mut row[t.lambda_index];
                *slot = Some(match slot.take() {
                    Some(prev) => prev.add(&v, self.embedding, self.prec)?,
                    None => v,
                });
            }
        }
        let (rows, entries) = rows.into_iter().unzip();
        Ok(CoefficientMatrix {
            rows,
            lambdas: self.lambdas.clone(),
            entries,
        })
    }

    /// Rebuilds the factored form from a matrix, one term per
    /// `(λ, β, α mod 1)` class.
    pub fn from_matrix(m: &CoefficientMatrix, embedding: usize, prec: u32) -> Result<Self> {
        let (lambdas, terms) = Self::factor_matrix(m, embedding, prec)?;
        NilssonExpansion::new(lambdas, terms, embedding, prec)
    }

    fn factor_matrix(
        m: &CoefficientMatrix,
        embedding: usize,
        prec: u32,
    ) -> Result<(Vec<Coeff>, Vec<ExpansionTerm>)> {
        type Key = (usize, u32, Rational);
        let mut groups: BTreeMap<Key, Vec<(Rational, Coeff)>> = BTreeMap::new();
        for (w, row) in m.rows.iter().zip(&m.entries) {
            for (col, c) in row.iter().enumerate() {
                if let Some(c) = c.as_ref().filter(|c| !c.is_zero()) {
                    groups
                        .entry((col, w.beta, frac(&w.alpha)))
                        .or_default()
                        .push((w.alpha.clone(), c.clone()));
                }
            }
        }
        let mut terms = Vec::new();
        for ((col, beta, _), mut cells) in groups {
            cells.sort_by(|a, b| a.0.cmp(&b.0));
            let alpha0 = cells[0].0.clone();
            let stokes = cells[0].1.clone();
            let top = Rational::from(&cells[cells.len() - 1].0 - &alpha0);
            let len = top.numer().to_usize().unwrap_or(0) + 1;
            let mut g = vec![Coeff::rational(Rational::new()); len];
            for (a, c) in &cells {
                let k = Rational::from(a - &alpha0).numer().to_usize().unwrap_or(0);
                g[k] = c.div(&stokes, embedding, prec)?;
            }
            g[0] = Coeff::rational(Rational::from(1));
            terms.push(ExpansionTerm {
                lambda_index: col,
                alpha: alpha0,
                beta,
                stokes,
                g: TruncatedSeries::normalized(g)?,
            });
        }
        terms.sort_by(|a, b| {
            a.lambda_index
                .cmp(&b.lambda_index)
                .then_with(|| a.index().cmp(&b.index()))
        });
        Ok((m.lambdas.clone(), terms))
    }

    /// Model value `Σ_{ω'≤cut} h_{ω'}(n) Σ_λ c_{ω',λ} λⁿ`.
    pub fn partial_sum(&self, cut: &OmegaIndex, n: u64, prec: u32) -> Result<BigComplex> {
        if !self.contains(cut) {
            return Err(Error::Precondition(format!(
                "cut {cut} is not an element of Omega"
            )));
        }
        let work = prec + 32;
        let m = self.to_matrix()?;
        let powers: Vec<BigComplex> = self
            .lambdas
            .iter()
            .map(|l| Ok(l.to_complex(self.embedding, work)?.powi(n as i64)))
            .collect::<Result<_>>()?;
        let mut acc = BigComplex::zero(work);
        for (w, row) in m.rows.iter().zip(&m.entries) {
            if w > cut {
                break;
            }
            let mut inner = BigComplex::zero(work);
            for (c, p) in row.iter().zip(&powers) {
                if let Some(c) = c {
                    inner = &inner + &(&c.to_complex(self.embedding, work)? * p);
                }
            }
            let h = NilssonMonomial::new(w.clone()).eval_real(n, work)?;
            acc = &acc + &inner.scale(&h);
        }
        Ok(acc.with_prec(prec))
    }

    /// Removes zero growth rates and zero rows and returns the canonical
    /// factored form.
    pub fn minimize(&self) -> Result<Self> {
        let m = self.to_matrix()?.minimize()?;
        let (lambdas, terms) = Self::factor_matrix(&m, self.embedding, self.prec)?;
        let derived = NilssonExpansion::new(lambdas, terms, self.embedding, self.prec)?;
        // keep the ambient Ω when it still covers the surviving rows
        if derived.terms.iter().all(|t| self.contains(&t.index())) {
            NilssonExpansion::with_omega(
                derived.lambdas,
                derived.terms,
                self.d,
                self.base.clone(),
                self.embedding,
                self.prec,
            )
        } else {
            Ok(derived)
        }
    }

    /// Largest stored Ω row.
    pub fn max_row(&self) -> Option<OmegaIndex> {
        self.terms
            .iter()
            .map(|t| t.index().shifted(t.g.order() as u32))
            .max()
    }

    /// Same expansion with every g-series cut at `k`.
    pub fn truncate(&self, k: usize) -> Self {
        let mut e = self.clone();
        for t in &mut e.terms {
            t.g = t.g.truncate(k);
        }
        e
    }
}

/// Dense `Ω × Λ` table of coefficients; `None` marks a cell that no term touches.
#[derive(Clone, Debug)]
pub struct CoefficientMatrix {
    pub rows: Vec<OmegaIndex>,
    pub lambdas: Vec<Coeff>,
    pub entries: Vec<Vec<Option<Coeff>>>,
}

impl CoefficientMatrix {
    fn cell_zero(c: &Option<Coeff>) -> bool {
        c.as_ref().map_or(true, Coeff::is_zero)
    }

    pub fn minimize(&self) -> Result<Self> {
        let keep_cols: Vec<usize> = (0..self.lambdas.len())
            .filter(|&j| self.entries.iter().any(|r| !Self::cell_zero(&r[j])))
            .collect();
        if keep_cols.is_empty() {
            return Err(Error::Precondition(
                "expansion is identically zero; a Nilsson expansion needs a nonzero coefficient"
                    .into(),
            ));
        }
        let mut rows = Vec::new();
        let mut entries = Vec::new();
        for (w, r) in self.rows.iter().zip(&self.entries) {
            if r.iter().all(Self::cell_zero) {
                continue;
            }
            rows.push(w.clone());
            entries.push(keep_cols.iter().map(|&j| r[j].clone()).collect());
        }
        Ok(CoefficientMatrix {
            rows,
            lambdas: keep_cols.iter().map(|&j| self.lambdas[j].clone()).collect(),
            entries,
        })
    }
}

fn coeff_close(a: &Coeff, b: &Coeff, ea: usize, eb: usize, tol: f64, prec: u32) -> Result<bool> {
    if let (Coeff::Exact(x), Coeff::Exact(y)) = (a, b) {
        let (x, y) = lift_pair(x, y);
        if x.field() == y.field() && (ea == eb || x.field().degree() == 1) {
            return Ok(x == y);
        }
    }
    Ok(close(&a.to_complex(ea, prec)?, &b.to_complex(eb, prec)?, tol))
}

/// Equality of the canonical representatives: same `Λ`, same rows, same
/// coefficients (exactly where both sides are exact, else within `tol`).
pub fn expansion_canonical_equal(a: &NilssonExpansion, b: &NilssonExpansion, tol: f64) -> bool {
    let inner = || -> Result<bool> {
        let prec = a.prec.min(b.prec);
        let ma = a.to_matrix()?.minimize()?;
        let mb = b.to_matrix()?.minimize()?;
        if ma.lambdas.len() != mb.lambdas.len() || ma.rows != mb.rows {
            return Ok(false);
        }
        // match columns of b to columns of a
        let mut perm = Vec::with_capacity(ma.lambdas.len());
        for la in &ma.lambdas {
            let mut found = None;
            for (j, lb) in mb.lambdas.iter().enumerate() {
                if !perm.contains(&j) && coeff_close(la, lb, a.embedding, b.embedding, tol, prec)? {
                    found = Some(j);
                    break;
                }
            }
            match found {
                Some(j) => perm.push(j),
                None => return Ok(false),
            }
        }
        let zero = Coeff::rational(Rational::new());
        for (ra, rb) in ma.entries.iter().zip(&mb.entries) {
            for (i, &j) in perm.iter().enumerate() {
                let x = ra[i].as_ref().unwrap_or(&zero);
                let y = rb[j].as_ref().unwrap_or(&zero);
                if !coeff_close(x, y, a.embedding, b.embedding, tol, prec)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    };
    inner().unwrap_or(false)
}

pub fn expansion_minimize(e: &NilssonExpansion) -> Result<NilssonExpansion> {
    e.minimize()
}

pub fn expansion_partial_sum(
    e: &NilssonExpansion,
    cut: &OmegaIndex,
    n: u64,
    prec: u32,
) -> Result<BigComplex> {
    e.partial_sum(cut, n, prec)
}
