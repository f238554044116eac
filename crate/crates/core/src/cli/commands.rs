use std::io::Write;
use std::path::{Path, PathBuf};

use rug::Rational;
use serde_json::{json, Map, Value};

use super::{CliError, Command, RecurrenceSource};
use crate::error::Error;
use crate::exactnum::{parse_rational, Coeff, NfElem};
use crate::extract::{
    check_expansion, estimate_growth, fit_coefficients, fit_model_from_value, fit_to_expansion,
    SequenceData, Trend,
};
use crate::gammakit::{
    beta_integral_closed, beta_integral_quad, gamma_ratio_polynomials, gamma_ratio_series,
    p_beta_polynomial,
};
use crate::io::literal::{coeff_to_value, complex_to_value, nf_literal, rational_to_string};
use crate::io::{
    expansion_from_value, expansion_to_value, meta, parse_json, to_pretty, values_from_value,
    values_to_value, Values,
};
use crate::multisum::{eval_multisum, gfunction_diagnostic, BalancedTerm};
use crate::recurrence::{
    builtin, characteristic_polynomial, formal_expansion, formal_solutions, parse_recurrence,
    residual_check, unroll, Recurrence,
};
use crate::series::OmegaIndex;

type CliResult<T> = std::result::Result<T, CliError>;

fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

fn read_json(path: &Path) -> CliResult<Value> {
    Ok(parse_json(&read_file(path)?)?)
}

fn emit(v: &Value, out: Option<&PathBuf>, stdout: &mut dyn Write) -> CliResult<()> {
    let text = to_pretty(v);
    match out {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("cannot write output: {e}"))),
    }
}

fn parse_u64(s: &str, what: &str) -> std::result::Result<u64, Error> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidInput(format!("{what}: {s:?} is not a natural number")))
}

/// `a..b` (inclusive) or a single `n`.
pub(crate) fn parse_n_range(s: &str) -> std::result::Result<(u64, u64), Error> {
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (parse_u64(a, "range start")?, parse_u64(b, "range end")?),
        None => {
            let n = parse_u64(s, "n")?;
            (n, n)
        }
    };
    if a > b {
        return Err(Error::InvalidInput(format!("empty range {s:?}")));
    }
    Ok((a, b))
}

/// `a:b` (inclusive).
pub(crate) fn parse_window(s: &str) -> std::result::Result<(u64, u64), Error> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| Error::InvalidInput(format!("window {s:?} must look like a:b")))?;
    let w = (parse_u64(a, "window start")?, parse_u64(b, "window end")?);
    if w.0 > w.1 {
        return Err(Error::InvalidInput(format!("empty window {s:?}")));
    }
    Ok(w)
}

pub(crate) fn parse_cuts(s: &str) -> std::result::Result<Vec<OmegaIndex>, Error> {
    s.split(';')
        .filter(|c| !c.trim().is_empty())
        .map(OmegaIndex::parse)
        .collect()
}

fn load_recurrence(src: &RecurrenceSource) -> CliResult<Recurrence> {
    match (&src.rec, &src.builtin) {
        (Some(p), None) => Ok(parse_recurrence(&read_file(p)?)?),
        (None, Some(name)) => Ok(builtin(name)?),
        _ => Err(Error::InvalidInput("give exactly one of --rec FILE or --builtin NAME".into()).into()),
    }
}

fn sequence_from_file(path: &Path) -> CliResult<SequenceData> {
    let (n_min, values) = values_from_value(&read_json(path)?)?;
    let embedding = match &values {
        Values::Exact(v) => v
            .iter()
            .map(|x| x.field())
            .find(|k| k.degree() > 1)
            .map_or(0, |k| k.default_embedding()),
        Values::Numeric(_) => 0,
    };
    Ok(SequenceData::new(n_min, values, embedding)?)
}

fn exact_or_literal(c: &Coeff) -> Value {
    match c {
        Coeff::Exact(x) if x.field().degree() > 1 => nf_literal(x),
        other => coeff_to_value(other),
    }
}

pub(crate) fn dispatch(
    cmd: Command,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CliResult<i32> {
    match cmd {
        Command::AnalyzeRecurrence {
            source,
            order,
            precision,
            out,
        } => {
            let rec = load_recurrence(&source)?;
            let sols = formal_solutions(&rec, order, precision)?;
            let grid: Vec<u64> = (6..=10).map(|e| 1u64 << e).collect();
            let mut items = Vec::new();
            for s in &sols {
                let res = residual_check(&rec, s, &grid, 64)?;
                let xs: Vec<f64> = grid.iter().map(|&n| (n as f64).ln()).collect();
                let ys: Vec<f64> = res.iter().map(|r| r.to_f64().ln()).collect();
                // an exact solution leaves no residual to measure
                let measured = ys.iter().all(|y| y.is_finite()).then(|| slope(&xs, &ys));
                items.push(json!({
                    "lambda": exact_or_literal(&s.lambda),
                    "lambda_approx": complex_to_value(&s.lambda_complex(64)?),
                    "alpha": exact_or_literal(&s.alpha),
                    "log_degree": s.log_degree,
                    "g": s.g.coeffs().iter().map(exact_or_literal).collect::<Vec<_>>(),
                    "residual_slope": measured,
                }));
            }
            let e = formal_expansion(&sols, precision)?;
            let m = meta(&[
                ("precision", json!(precision)),
                ("order", json!(order)),
                ("stokes_known", json!(false)),
            ]);
            let mut v = expansion_to_value(&e, m)?;
            let obj = v.as_object_mut().expect("expansion is an object");
            obj.insert(
                "characteristic_polynomial".into(),
                json!(characteristic_polynomial(&rec)
                    .iter()
                    .map(rational_to_string)
                    .collect::<Vec<_>>()),
            );
            obj.insert("solutions".into(), Value::Array(items));
            emit(&v, out.as_ref(), stdout)?;
            Ok(0)
        }
        Command::Unroll { source, n, out } => {
            let rec = load_recurrence(&source)?;
            let (lo, hi) = parse_n_range(&n)?;
            let vals: Vec<NfElem> = unroll(&rec, hi)?.into_iter().skip(lo as usize).collect();
            let v = values_to_value(lo, &Values::Exact(vals), meta(&[("range", json!(n))]))?;
            emit(&v, out.as_ref(), stdout)?;
            Ok(0)
        }
        Command::EvalMultisum { term, n, out } => {
            let t = if Path::new(&term).is_file() {
                BalancedTerm::from_value(&read_json(Path::new(&term))?)?
            } else {
                BalancedTerm::builtin(&term)?
            };
            let (lo, hi) = parse_n_range(&n)?;
            let vals = (lo..=hi)
                .map(|k| eval_multisum(&t, k))
                .collect::<crate::error::Result<Vec<_>>>()?;
            let v = values_to_value(
                lo,
                &Values::Exact(vals),
                meta(&[("term", json!(term)), ("range", json!(n))]),
            )?;
            emit(&v, out.as_ref(), stdout)?;
            Ok(0)
        }
        Command::Fit {
            values,
            model,
            window,
            precision,
            out,
        } => {
            let data = sequence_from_file(&values)?;
            let w = parse_window(&window)?;
            let model = fit_model_from_value(&read_json(&model)?, w, precision)?;
            let fit = fit_coefficients(&data, &model)?;
            let e = fit_to_expansion(&model, &fit)?;
            let m = meta(&[
                ("precision", json!(precision)),
                ("window", json!([w.0, w.1])),
                ("fit", fit.to_value(&model)),
            ]);
            emit(&expansion_to_value(&e, m)?, out.as_ref(), stdout)?;
            if out.is_some() {
                let _ = writeln!(
                    stderr,
                    "fit: condition {:.3e}, residual {:.3e}, stable digits {:.2}",
                    fit.condition_estimate, fit.residual_norm, fit.stability_digits
                );
            }
            Ok(0)
        }
        Command::Check {
            values,
            expansion,
            cuts,
            window,
            precision,
            table,
            strict,
        } => {
            let data = sequence_from_file(&values)?;
            let e = expansion_from_value(&read_json(&expansion)?)?;
            let cuts = parse_cuts(&cuts)?;
            let w = parse_window(&window)?;
            let prec = precision.unwrap_or(e.precision());
            let rep = check_expansion(&data, &e, &cuts, w, prec)?;
            if table {
                stdout
                    .write_all(rep.table().as_bytes())
                    .map_err(|e| CliError::Io(e.to_string()))?;
            } else {
                let mut v = rep.to_value();
                v["meta"] = meta(&[("precision", json!(prec)), ("window", json!([w.0, w.1]))]);
                emit(&v, None, stdout)?;
            }
            Ok(if strict && !rep.pass { 2 } else { 0 })
        }
        Command::GammaSeries {
            gamma,
            order,
            symbolic,
        } => {
            let g = parse_rational(&gamma)?;
            let s = gamma_ratio_series(&g, order);
            let mut m = Map::new();
            m.insert("gamma".into(), json!(rational_to_string(&g)));
            m.insert("order".into(), json!(order));
            m.insert(
                "coefficients".into(),
                json!(s.coefficients.iter().map(rational_to_string).collect::<Vec<_>>()),
            );
            if symbolic {
                let polys: Vec<Vec<String>> = gamma_ratio_polynomials(order)
                    .iter()
                    .map(|p| p.iter().map(rational_to_string).collect())
                    .collect();
                m.insert("polynomials_in_gamma".into(), json!(polys));
            }
            m.insert("meta".into(), meta(&[]));
            emit(&Value::Object(m), None, stdout)?;
            Ok(0)
        }
        Command::BetaIntegral {
            gamma,
            beta,
            n,
            precision,
            quad,
            rel_tol,
        } => {
            let g = parse_rational(&gamma)?;
            let closed = beta_integral_closed(&g, beta, n, precision)?;
            let digits = crate::exactnum::prec_digits(precision);
            let mut m = Map::new();
            m.insert("gamma".into(), json!(rational_to_string(&g)));
            m.insert("beta".into(), json!(beta));
            m.insert("n".into(), json!(n));
            m.insert("p_beta".into(), json!(p_beta_polynomial(beta)?.to_string()));
            m.insert("closed".into(), json!(closed.value.to_decimal(digits).0));
            if quad {
                let q = beta_integral_quad(&g, beta, n, rel_tol)?;
                let c = closed.value.re().to_f64();
                let qv = q.value.re().to_f64();
                m.insert("quad".into(), json!(qv));
                m.insert("relative_difference".into(), json!(((qv - c) / c).abs()));
            }
            m.insert("meta".into(), meta(&[("precision", json!(precision))]));
            emit(&Value::Object(m), None, stdout)?;
            Ok(0)
        }
        Command::Diagnose { values, window } => {
            let data = sequence_from_file(&values)?;
            let w = match window {
                Some(w) => parse_window(&w)?,
                None => {
                    let lo = data.n_min().max(1) + data.len() as u64 / 3;
                    (lo.min(data.n_max()), data.n_max())
                }
            };
            let g = estimate_growth(&data, w)?;
            let mut m = Map::new();
            m.insert(
                "growth".into(),
                json!({
                    "r": g.r,
                    "r_max": g.r_max,
                    "alpha": g.alpha,
                    "halves": [g.halves.0, g.halves.1],
                    "halves_max": [g.halves_max.0, g.halves_max.1],
                    "trend": match g.trend {
                        Trend::Stable => "stable",
                        Trend::Decaying => "decaying",
                        Trend::Growing => "growing",
                    },
                    "note": g.note,
                }),
            );
            let rationals: Option<Vec<Rational>> = match data.values() {
                Values::Exact(v) => v.iter().map(|x| x.as_rational().cloned()).collect(),
                Values::Numeric(_) => None,
            };
            let gf = match rationals {
                Some(r) => {
                    let rep = gfunction_diagnostic(&r, data.n_min(), w)?;
                    json!({
                        "size_c": rep.size_c,
                        "denom_c": rep.denom_c,
                        "size_halves": [rep.size_halves.0, rep.size_halves.1],
                        "denom_halves": [rep.denom_halves.0, rep.denom_halves.1],
                        "g_compatible": rep.g_compatible,
                        "note": rep.note,
                    })
                }
                None => json!({"note": "values are not rational; denominator statistics skipped"}),
            };
            m.insert("gfunction".into(), gf);
            m.insert("meta".into(), meta(&[("window", json!([w.0, w.1]))]));
            emit(&Value::Object(m), None, stdout)?;
            Ok(0)
        }
    }
}

/// Least-squares slope of `ys` against `xs`.
fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_n_range("0..12").unwrap(), (0, 12));
        assert_eq!(parse_n_range("7").unwrap(), (7, 7));
        assert!(parse_n_range("5..2").is_err());
        assert!(parse_n_range("a..2").is_err());
        assert_eq!(parse_window("150:300").unwrap(), (150, 300));
        assert!(parse_window("150..300").is_err());
        let c = parse_cuts("3/2,0;5/2,0").unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c[1], OmegaIndex::from_ints(5, 2, 0));
    }
}
