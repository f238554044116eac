use rug::{Float, Rational};
use serde_json::{json, Map, Value};

use super::data::SequenceData;
use crate::error::{Error, Result};
use crate::exactnum::{prec_digits, BigComplex, Coeff};
use crate::io::literal::{coeff_from_value, coeff_to_value, minpoly_from_value, rational_from_value, rational_to_string};
use crate::series::{
    ExpansionTerm, NilssonExpansion, NilssonMonomial, OmegaIndex, TruncatedSeries,
};

/// One model column `λⁿ n^{-α-k} (log n)^β`.
#[derive(Clone, Debug, PartialEq)]
pub struct FitMonomial {
    pub lambda: usize,
    pub alpha: Rational,
    pub beta: u32,
    pub k: u32,
}

#[derive(Clone, Debug)]
pub struct FitModel {
    pub lambdas: Vec<Coeff>,
    pub monomials: Vec<FitMonomial>,
    /// Inclusive `n`-range.
    pub window: (u64, u64),
    pub precision: u32,
    pub embedding: usize,
}

impl FitModel {
    pub fn new(
        lambdas: Vec<Coeff>,
        monomials: Vec<FitMonomial>,
        window: (u64, u64),
        precision: u32,
        embedding: usize,
    ) -> Result<Self> {
        let m = FitModel {
            lambdas,
            monomials,
            window,
            precision,
            embedding,
        };
        m.validate()?;
        Ok(m)
    }

    /// Columns `k = 0..=K` for each `(λ index, α, β, K)` branch.
    pub fn series(
        lambdas: Vec<Coeff>,
        branches: &[(usize, Rational, u32, u32)],
        window: (u64, u64),
        precision: u32,
        embedding: usize,
    ) -> Result<Self> {
        let monomials = branches
            .iter()
            .flat_map(|(l, a, b, kmax)| {
                (0..=*kmax).map(move |k| FitMonomial {
                    lambda: *l,
                    alpha: a.clone(),
                    beta: *b,
                    k,
                })
            })
            .collect();
        Self::new(lambdas, monomials, window, precision, embedding)
    }

    fn validate(&self) -> Result<()> {
        if self.monomials.is_empty() {
            return Err(Error::InvalidInput("fit model has no monomials".into()));
        }
        if let Some(m) = self.monomials.iter().find(|m| m.lambda >= self.lambdas.len()) {
            return Err(Error::InvalidInput(format!(
                "monomial refers to growth rate #{} but only {} are given",
                m.lambda,
                self.lambdas.len()
            )));
        }
        for (i, a) in self.monomials.iter().enumerate() {
            if self.monomials[..i].contains(a) {
                return Err(Error::InvalidInput("fit model repeats a monomial".into()));
            }
        }
        let (lo, hi) = self.window;
        if lo < 2 || hi < lo {
            return Err(Error::InvalidInput(format!(
                "fit window {lo}:{hi} must satisfy 2 <= lo <= hi"
            )));
        }
        let rows = (hi - lo + 1) as usize;
        if rows < self.monomials.len() + 2 {
            return Err(Error::Precondition(format!(
                "window has {rows} points but {} monomials need at least {}",
                self.monomials.len(),
                self.monomials.len() + 2
            )));
        }
        Ok(())
    }

    pub fn with_window(&self, window: (u64, u64)) -> Result<Self> {
        let mut m = self.clone();
        m.window = window;
        m.validate()?;
        Ok(m)
    }
}

fn model_uint(m: &Map<String, Value>, key: &str) -> Result<u32> {
    m.get(key).map_or(Ok(0), |x| {
        x.as_u64()
            .and_then(|x| u32::try_from(x).ok())
            .ok_or_else(|| Error::InvalidInput(format!("{key} must be a small natural number")))
    })
}

fn model_entry(x: &Value) -> Result<(usize, Rational, u32, &Map<String, Value>)> {
    let m = x
        .as_object()
        .ok_or_else(|| Error::InvalidInput("model entries must be objects".into()))?;
    let alpha = m
        .get("alpha")
        .ok_or_else(|| Error::InvalidInput("model entry needs \"alpha\"".into()))?;
    Ok((
        model_uint(m, "lambda")? as usize,
        rational_from_value(alpha)?,
        model_uint(m, "beta")?,
        m,
    ))
}

/// Reads `{"lambdas": [...], "monomials": [{lambda, alpha, beta, k}]}` or
/// `{"lambdas": [...], "series": [{lambda, alpha, beta, K}]}`; `minpoly`
/// and `embedding` are optional.
pub fn fit_model_from_value(v: &Value, window: (u64, u64), precision: u32) -> Result<FitModel> {
    let map = v
        .as_object()
        .ok_or_else(|| Error::InvalidInput("model must be a JSON object".into()))?;
    let field = map.get("minpoly").map(minpoly_from_value).transpose()?;
    let lambdas = map
        .get("lambdas")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::InvalidInput("model needs an array \"lambdas\"".into()))?
        .iter()
        .map(|l| coeff_from_value(l, field.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    let embedding = match map.get("embedding") {
        Some(e) => e
            .as_u64()
            .ok_or_else(|| Error::InvalidInput("embedding must be an integer".into()))?
            as usize,
        None => field.as_ref().map_or(0, |k| k.default_embedding()),
    };
    match (map.get("monomials"), map.get("series")) {
        (Some(Value::Array(items)), None) => {
            let monomials = items
                .iter()
                .map(|x| {
                    let (lambda, alpha, beta, m) = model_entry(x)?;
                    Ok(FitMonomial {
                        lambda,
                        alpha,
                        beta,
                        k: model_uint(m, "k")?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            FitModel::new(lambdas, monomials, window, precision, embedding)
        }
        (None, Some(Value::Array(items))) => {
            let branches = items
                .iter()
                .map(|x| {
                    let (lambda, alpha, beta, m) = model_entry(x)?;
                    Ok((lambda, alpha, beta, model_uint(m, "K")?))
                })
                .collect::<Result<Vec<_>>>()?;
            FitModel::series(lambdas, &branches, window, precision, embedding)
        }
        _ => Err(Error::InvalidInput(
            "model needs exactly one of the arrays \"monomials\" or \"series\"".into(),
        )),
    }
}

#[derive(Clone, Debug)]
pub struct FitResult {
    /// Aligned with the model monomials.
    pub coefficients: Vec<BigComplex>,
    /// 2-norm of the row-equilibrated residual.
    pub residual_norm: f64,
    /// `max |R_ii| / min |R_ii|` after column scaling.
    pub condition_estimate: f64,
    /// Smallest per-coefficient agreement between the two half-window fits.
    pub stability_digits: f64,
    pub coefficient_digits: Vec<f64>,
    pub note: String,
}

impl FitResult {
    pub fn to_value(&self, model: &FitModel) -> Value {
        let coeffs: Vec<Value> = model
            .monomials
            .iter()
            .zip(&self.coefficients)
            .zip(&self.coefficient_digits)
            .map(|((m, c), d)| {
                json!({
                    "lambda": m.lambda,
                    "alpha": rational_to_string(&m.alpha),
                    "beta": m.beta,
                    "k": m.k,
                    "value": coeff_to_value(&Coeff::Numeric(c.clone())),
                    "stable_digits": round2(*d),
                })
            })
            .collect();
        json!({
            "coefficients": coeffs,
            "residual_norm": self.residual_norm,
            "condition_estimate": self.condition_estimate,
            "stability_digits": round2(self.stability_digits),
            "note": self.note,
        })
    }
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// Complex least squares by Householder QR. Returns the solution, the
/// residual norm and the diagonal of `R`.
pub(crate) fn lstsq(
    mut a: Vec<Vec<BigComplex>>,
    mut b: Vec<BigComplex>,
    prec: u32,
) -> Result<(Vec<BigComplex>, Float, Vec<Float>)> {
    let m = a.len();
    let p = a.first().map_or(0, Vec::len);
    if m < p || p == 0 {
        return Err(Error::Internal("least squares needs rows >= columns > 0".into()));
    }
    let mut diag = Vec::with_capacity(p);
    for j in 0..p {
        let mut norm2 = Float::with_val(prec, 0);
        for row in a.iter().skip(j) {
            norm2 += row[j].norm_sqr();
        }
        let norm = norm2.sqrt();
        if norm.is_zero() {
            return Err(Error::IllConditioned {
                estimate: f64::INFINITY,
                limit: f64::INFINITY,
            });
        }
        // alpha = -e^{i arg x_0} |x|
        let x0 = a[j][j].clone();
        let x0_abs = x0.abs();
        let phase = if x0_abs.is_zero() {
            BigComplex::one(prec)
        } else {
            x0.scale(&Float::with_val(prec, x0_abs.recip_ref()))
        };
        let alpha = -phase.scale(&norm);
        let mut v: Vec<BigComplex> = a.iter().skip(j).map(|row| row[j].clone()).collect();
        v[0] = &v[0] - &alpha;
        let mut vnorm2 = Float::with_val(prec, 0);
        for x in &v {
            vnorm2 += x.norm_sqr();
        }
        if !vnorm2.is_zero() {
            let two_over = Float::with_val(prec, 2u32) / &vnorm2;
            for c in j..p {
                let mut dot = BigComplex::zero(prec);
                for (vi, row) in v.iter().zip(a.iter().skip(j)) {
                    dot = &dot + &(&vi.conj() * &row[c]);
                }
                let f = dot.scale(&two_over);
                for (vi, row) in v.iter().zip(a.iter_mut().skip(j)) {
                    row[c] = &row[c] - &(vi * &f);
                }
            }
            let mut dot = BigComplex::zero(prec);
            for (vi, x) in v.iter().zip(b.iter().skip(j)) {
                dot = &dot + &(&vi.conj() * x);
            }
            let f = dot.scale(&two_over);
            for (vi, x) in v.iter().zip(b.iter_mut().skip(j)) {
                *x = &*x - &(vi * &f);
            }
        }
        a[j][j] = alpha;
        diag.push(norm);
    }
    let mut x = vec![BigComplex::zero(prec); p];
    for j in (0..p).rev() {
        let mut s = b[j].clone();
        for k in j + 1..p {
            s = &s - &(&a[j][k] * &x[k]);
        }
        x[j] = &s / &a[j][j];
    }
    let mut res2 = Float::with_val(prec, 0);
    for r in b.iter().skip(p) {
        res2 += r.norm_sqr();
    }
    Ok((x, res2.sqrt(), diag))
}

struct RawFit {
    coefficients: Vec<BigComplex>,
    residual_norm: f64,
    condition_estimate: f64,
}

fn fit_raw(data: &SequenceData, model: &FitModel) -> Result<RawFit> {
    data.check_window(model.window)?;
    let prec = model.precision.max(64);
    let work = prec + 32;
    let lambdas: Vec<BigComplex> = model
        .lambdas
        .iter()
        .map(|l| l.to_complex(model.embedding, work))
        .collect::<Result<_>>()?;
    let p = model.monomials.len();
    let (lo, hi) = model.window;
    let mut rows = Vec::with_capacity((hi - lo + 1) as usize);
    let mut rhs = Vec::with_capacity(rows.capacity());
    let mut pows: Vec<BigComplex> = lambdas.iter().map(|l| l.powi(lo as i64)).collect();
    for n in lo..=hi {
        let mut row: Vec<BigComplex> = model
            .monomials
            .iter()
            .map(|m| {
                let w = OmegaIndex::new(Rational::from(&m.alpha + m.k), m.beta);
                let h = NilssonMonomial::new(w).eval_real(n, work)?;
                Ok(pows[m.lambda].scale(&h))
            })
            .collect::<Result<_>>()?;
        let mut y = data.value(n, work)?;
        // row equilibration
        let big = row.iter().map(BigComplex::abs).fold(Float::with_val(work, 0), |a, b| a.max(&b));
        if !big.is_zero() {
            let inv = Float::with_val(work, big.recip_ref());
            for x in row.iter_mut() {
                *x = x.scale(&inv);
            }
            y = y.scale(&inv);
        }
        rows.push(row);
        rhs.push(y);
        for (pw, l) in pows.iter_mut().zip(&lambdas) {
            *pw = &*pw * l;
        }
    }
    let mut col_scale = Vec::with_capacity(p);
    for j in 0..p {
        let big = rows
            .iter()
            .map(|r| r[j].abs())
            .fold(Float::with_val(work, 0), |a, b| a.max(&b));
        if big.is_zero() {
            return Err(Error::IllConditioned {
                estimate: f64::INFINITY,
                limit: condition_limit(prec),
            });
        }
        let inv = Float::with_val(work, big.recip_ref());
        for r in rows.iter_mut() {
            r[j] = r[j].scale(&inv);
        }
        col_scale.push(inv);
    }
    let (y, residual, diag) = lstsq(rows, rhs, work)?;
    let dmax = diag.iter().map(Float::to_f64).fold(0.0, f64::max);
    let dmin = diag.iter().map(Float::to_f64).fold(f64::INFINITY, f64::min);
    let cond = if dmin > 0.0 { dmax / dmin } else { f64::INFINITY };
    let limit = condition_limit(prec);
    if !(cond <= limit) {
        return Err(Error::IllConditioned {
            estimate: cond,
            limit,
        });
    }
    let coefficients = y
        .iter()
        .zip(&col_scale)
        .map(|(c, s)| c.scale(s).with_prec(prec))
        .collect();
    Ok(RawFit {
        coefficients,
        residual_norm: residual.to_f64(),
        condition_estimate: cond,
    })
}

/// `10^{digits/2}` for the working precision.
pub fn condition_limit(prec: u32) -> f64 {
    10f64.powf(prec_digits(prec) as f64 / 2.0)
}

fn agreement_digits(a: &BigComplex, b: &BigComplex, cap: f64) -> f64 {
    let scale = a.abs_f64().max(b.abs_f64());
    let diff = (a - b).abs_f64();
    if diff == 0.0 {
        return cap;
    }
    if scale == 0.0 {
        return 0.0;
    }
    (-(diff / scale).log10()).clamp(0.0, cap)
}

/// Least-squares fit of the data on the model window, with half-window
/// stability digits.
pub fn fit_coefficients(data: &SequenceData, model: &FitModel) -> Result<FitResult> {
    let full = fit_raw(data, model)?;
    // two guard digits below the working precision
    let cap = prec_digits(model.precision.max(64)) as f64 - 2.0;
    let (lo, hi) = model.window;
    let mid = lo + (hi - lo) / 2;
    let halves = model
        .with_window((lo, mid))
        .and_then(|m1| model.with_window((mid + 1, hi)).map(|m2| (m1, m2)));
    let (coefficient_digits, note) = match halves {
        Ok((m1, m2)) => match (fit_raw(data, &m1), fit_raw(data, &m2)) {
            (Ok(a), Ok(b)) => (
                a.coefficients
                    .iter()
                    .zip(&b.coefficients)
                    .map(|(x, y)| agreement_digits(x, y, cap))
                    .collect(),
                "stability digits from the two half-window fits".to_string(),
            ),
            (Err(e), _) | (_, Err(e)) => (
                vec![0.0; full.coefficients.len()],
                format!("half-window fit failed ({e}); no stability claim"),
            ),
        },
        Err(_) => (
            vec![0.0; full.coefficients.len()],
            "window too short to split; no stability claim".to_string(),
        ),
    };
    let stability_digits = coefficient_digits.iter().cloned().fold(cap, f64::min);
    Ok(FitResult {
        coefficients: full.coefficients,
        residual_norm: full.residual_norm,
        condition_estimate: full.condition_estimate,
        stability_digits,
        coefficient_digits,
        note,
    })
}

/// Groups the fitted columns by `(λ, α, β)` into factored expansion terms
/// with `S` the `k = 0` coefficient.
pub fn fit_to_expansion(model: &FitModel, fit: &FitResult) -> Result<NilssonExpansion> {
    let prec = model.precision.max(64);
    let mut groups: Vec<((usize, Rational, u32), Vec<(u32, BigComplex)>)> = Vec::new();
    for (m, c) in model.monomials.iter().zip(&fit.coefficients) {
        let key = (m.lambda, m.alpha.clone(), m.beta);
        match groups.iter_mut().find(|g| g.0 == key) {
            Some(g) => g.1.push((m.k, c.clone())),
            None => groups.push((key, vec![(m.k, c.clone())])),
        }
    }
    let mut terms = Vec::new();
    for ((lambda_index, alpha, beta), mut cs) in groups {
        cs.sort_by_key(|x| x.0);
        let k0 = cs[0].0;
        let stokes = cs[0].1.clone();
        if stokes.is_zero() {
            return Err(Error::Precondition(format!(
                "leading coefficient of branch ({lambda_index}, {alpha}, {beta}) is zero"
            )));
        }
        let kmax = cs.last().unwrap().0;
        let mut g = vec![Coeff::Numeric(BigComplex::zero(prec)); (kmax - k0 + 1) as usize];
        for (k, c) in &cs {
            g[(k - k0) as usize] = Coeff::Numeric(c / &stokes);
        }
        g[0] = Coeff::rational(Rational::from(1));
        terms.push(ExpansionTerm {
            lambda_index,
            alpha: alpha + k0,
            beta,
            stokes: Coeff::Numeric(stokes),
            g: TruncatedSeries::normalized(g)?,
        });
    }
    NilssonExpansion::new(model.lambdas.clone(), terms, model.embedding, prec)
}
