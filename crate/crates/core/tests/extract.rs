use nilsson::exactnum::{BigComplex, Coeff, NfElem};
use nilsson::extract::*;
use nilsson::recurrence::{builtin, unroll};
use nilsson::series::OmegaIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Float, Rational};

fn tet6j_data(n_max: u64) -> SequenceData {
    let vals: Vec<NfElem> = unroll(&builtin("tet6j").unwrap(), n_max).unwrap();
    SequenceData::from_exact(0, vals, 0).unwrap()
}

/// `e^{∓ 6 i arccos(1/3)}`.
fn tet6j_lambdas(prec: u32) -> Vec<Coeff> {
    let t = Float::with_val(prec, Float::with_val(prec, 3u32).recip()).acos() * 6u32;
    let one = Float::with_val(prec, 1u32);
    vec![
        Coeff::Numeric(BigComplex::from_polar(&one, &Float::with_val(prec, -&t))),
        Coeff::Numeric(BigComplex::from_polar(&one, &t)),
    ]
}

fn tet6j_model(window: (u64, u64), k: u32, prec: u32) -> FitModel {
    let a = Rational::from((3, 2));
    FitModel::series(
        tet6j_lambdas(prec),
        &[(0, a.clone(), 0, k), (1, a, 0, k)],
        window,
        prec,
        0,
    )
    .unwrap()
}

fn expected_ratio(sign: f64, k: usize) -> (f64, f64) {
    let s2 = 2f64.sqrt();
    match k {
        1 => (-432.0 / 576.0, sign * 31.0 * s2 / 576.0),
        2 => (109847.0 / 331776.0, -sign * 22320.0 * s2 / 331776.0),
        _ => unreachable!(),
    }
}

#[test]
fn tet6j_fit_reproduces_series_ratios() {
    let prec = 256;
    let data = tet6j_data(300);
    let model = tet6j_model((150, 300), 7, prec);
    let fit = fit_coefficients(&data, &model).unwrap();
    assert!(fit.coefficient_digits[0] > 10.0 && fit.coefficient_digits[1] > 10.0);
    for (branch, sign) in [(0usize, 1.0), (1, -1.0)] {
        let c0 = &fit.coefficients[branch * 8];
        for k in 1..=2 {
            let ratio = &fit.coefficients[branch * 8 + k] / c0;
            let (re, im) = expected_ratio(sign, k);
            let want = BigComplex::from_f64(re, im, 64);
            let rel = (&ratio.with_prec(64) - &want).abs_f64() / want.abs_f64();
            assert!(rel < if k == 1 { 1e-2 } else { 5e-2 });
        }
    }
}

#[test]
fn tet6j_growth_rate() {
    let data = tet6j_data(400);
    let g = estimate_growth(&data, (100, 300)).unwrap();
    assert!((g.r - 1.0).abs() < 1e-2, "{g:?}");
    assert_eq!(g.trend, Trend::Stable);
    assert!((g.alpha - 1.5).abs() < 0.2);
}

#[test]
fn growth_estimate_ignores_scaling() {
    let data = tet6j_data(400);
    let scaled = SequenceData::from_exact(
        0,
        (0..=400)
            .map(|n| data.exact(n).unwrap().scale(&Rational::from(1_000_000)))
            .collect(),
        0,
    )
    .unwrap();
    let a = estimate_growth(&data, (200, 400)).unwrap();
    let b = estimate_growth(&scaled, (200, 400)).unwrap();
    assert!((a.r - b.r).abs() < 1e-2);
}

#[test]
fn fitted_expansion_checks_on_a_later_window() {
    let prec = 256;
    let data = tet6j_data(600);
    let model = tet6j_model((150, 300), 7, prec);
    let fit = fit_coefficients(&data, &model).unwrap();
    let e = fit_to_expansion(&model, &fit).unwrap();
    let cuts = [OmegaIndex::from_ints(3, 2, 0), OmegaIndex::from_ints(5, 2, 0)];
    let rep = check_expansion(&data, &e, &cuts, (300, 600), 128).unwrap();
    assert!(rep.pass, "{}", rep.table());

    // a slightly wrong frequency breaks the first rung
    let mut lambdas = tet6j_lambdas(prec);
    let nudge = BigComplex::from_polar(&Float::with_val(prec, 1u32), &Float::with_val(prec, 1e-3));
    lambdas[0] = Coeff::Numeric(&lambdas[0].to_complex(0, prec).unwrap() * &nudge);
    lambdas[1] = Coeff::Numeric(&lambdas[1].to_complex(0, prec).unwrap() * &nudge.conj());
    let wrong = FitModel { lambdas, ..model.clone() };
    let e = fit_to_expansion(&wrong, &fit).unwrap();
    let rep = check_expansion(&data, &e, &cuts, (300, 600), 128).unwrap();
    assert!(!rep.rows[0].pass, "{}", rep.table());
}

fn unit(angle: f64) -> BigComplex {
    BigComplex::from_polar(&Float::with_val(128, 1u32), &Float::with_val(128, angle))
}

#[test]
fn averaging_error_is_order_one_over_n() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..4 {
        let m = rng.gen_range(2..=3);
        let angles: Vec<f64> = (0..m).map(|j| 0.3 + 2.0 * j as f64 + rng.gen_range(0.0..1.0)).collect();
        let coeffs: Vec<f64> = (0..m).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let lambdas: Vec<BigComplex> = angles.iter().map(|&a| unit(a)).collect();
        let data = SequenceData::from_fn(0, 16_000, |n| {
            let mut acc = BigComplex::zero(128);
            for (l, c) in lambdas.iter().zip(&coeffs) {
                acc = &acc + &l.powi(n as i64).scale(&Float::with_val(128, *c));
            }
            acc
        })
        .unwrap();
        // geometric-sum bound: Σ_{j≠i} 2|c_j| / |1 - λ_j/λ_i|
        let bound: f64 = (0..m)
            .map(|i| {
                (0..m)
                    .filter(|&j| j != i)
                    .map(|j| 2.0 * coeffs[j].abs() / (&unit(0.0) - &(&lambdas[j] / &lambdas[i])).abs_f64())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max);
        let one = Float::with_val(128, 1u32);
        for n in [1000u64, 4000, 16_000] {
            let res = average_extract(&data, &lambdas, &one, &OmegaIndex::from_ints(0, 1, 0), n, 128)
                .unwrap();
            for (got, want) in res.coefficients.iter().zip(&coeffs) {
                let err = (got - &BigComplex::from_f64(*want, 0.0, 128)).abs_f64();
                assert!(err * n as f64 <= 1.05 * bound + 1e-6, "N={n} err={err} bound={bound}");
            }
        }
    }
}

#[test]
fn random_models_are_recovered() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let prec = 213; // 64 digits
    for case in 0..12 {
        let r = [1.0f64, 2.0][case % 2];
        let nl = rng.gen_range(1..=2);
        let lambdas: Vec<Coeff> = (0..nl)
            .map(|j| {
                let a = 0.5 + 2.5 * j as f64 + rng.gen_range(0.0..1.0);
                Coeff::Numeric(BigComplex::from_polar(
                    &Float::with_val(prec, r),
                    &Float::with_val(prec, a),
                ))
            })
            .collect();
        let count = rng.gen_range(2..=6usize);
        let mut monomials: Vec<FitMonomial> = Vec::new();
        while monomials.len() < count {
            let m = FitMonomial {
                lambda: rng.gen_range(0..nl),
                alpha: Rational::from((rng.gen_range(0..4), 2)),
                beta: rng.gen_range(0..2),
                k: rng.gen_range(0..3),
            };
            let dup = monomials.iter().any(|x| {
                x.lambda == m.lambda
                    && x.beta == m.beta
                    && Rational::from(&x.alpha + x.k) == Rational::from(&m.alpha + m.k)
            });
            if !dup {
                monomials.push(m);
            }
        }
        let truth: Vec<BigComplex> = (0..count)
            .map(|_| BigComplex::from_f64(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), prec))
            .collect();
        let lo = 40u64;
        let hi = lo + 3 * count as u64 * 4;
        let model = FitModel::new(lambdas.clone(), monomials.clone(), (lo, hi), prec, 0).unwrap();
        let data = SequenceData::from_fn(2, hi, |n| {
            let mut acc = BigComplex::zero(prec + 64);
            for (m, c) in monomials.iter().zip(&truth) {
                let lam = lambdas[m.lambda].to_complex(0, prec + 64).unwrap().powi(n as i64);
                let h = nilsson::series::NilssonMonomial::new(OmegaIndex::new(
                    Rational::from(&m.alpha + m.k),
                    m.beta,
                ))
                .eval_real(n.max(2), prec + 64)
                .unwrap();
                acc = &acc + &(&lam.scale(&h) * c);
            }
            acc
        })
        .unwrap();
        let fit = fit_coefficients(&data, &model).unwrap();
        assert!(fit.stability_digits >= 6.0, "case {case}: {fit:?}");
        for (got, want) in fit.coefficients.iter().zip(&truth) {
            let rel = (got - want).abs_f64() / want.abs_f64();
            assert!(
                rel <= 10f64.powf(-fit.stability_digits),
                "case {case}: rel {rel:e}, declared {}",
                fit.stability_digits
            );
        }
    }
}

#[test]
fn tet6j_gevrey_anchor() {
    let rec = builtin("tet6j").unwrap();
    let sols = nilsson::recurrence::formal_solutions(&rec, 6, 256).unwrap();
    let rep = gevrey_diagnostic(&sols[0].g, sols[0].embedding).unwrap();
    // regression anchor
    assert!((rep.c - 0.415_021_878_148_953_97).abs() < 1e-9, "{rep:?}");
    assert_eq!(rep.per_k.len(), 5);
}
