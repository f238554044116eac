use nilsson::gammakit::*;
use rug::{Float, Rational};

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn closed_form_and_quadrature_agree_on_grid() {
    for g in [(1, 3), (1, 2), (3, 4)] {
        let g = Rational::from(g);
        for b in 0..=2 {
            for n in [3, 7, 15] {
                let c = beta_integral_closed(&g, b, n, 128).unwrap().value.re().to_f64();
                let q = beta_integral_quad(&g, b, n, 1e-12).unwrap().value.re().to_f64();
                assert!(rel(q, c) <= 1e-10, "γ={g} β={b} n={n}: {c} vs {q}");
            }
        }
    }
}

#[test]
fn printed_displays_parse_back_to_the_computed_polynomials() {
    let displays = [
        "p_0(n) = 1",
        "p_1(n) = -\\psi(n+1-\\gamma)+\\psi(\\gamma)",
        "p_2(n) = \\psi(n+1-\\gamma)^2 + \\psi^{(1)}(n+1-\\gamma) -2 \\psi(\\gamma) \\psi(n+1-\\gamma)\n+\\psi(\\gamma)^2 + \\psi^{(1)}(\\gamma)",
    ];
    for (b, d) in displays.iter().enumerate() {
        let parsed = parse_polygamma_latex(d).unwrap();
        let computed = p_beta_polynomial(b as u32).unwrap();
        assert_eq!(parsed, computed);
        assert_eq!(parsed.to_string(), computed.to_string());
    }
}

#[test]
fn beta_integral_is_nilsson_in_n() {
    let prec = 128;
    let n: u64 = 10_000;
    for g in [(1, 3), (1, 2), (3, 4)] {
        let g = Rational::from(g);
        let i = beta_integral_closed(&g, 0, n, prec).unwrap();
        let ln_gg = ln_gamma(&g, prec).unwrap();
        let nf = Float::with_val(prec, n);
        let scaled = Float::with_val(prec, i.value.re() / ln_gg.exp())
            * (nf.ln() * Float::with_val(prec, &g)).exp();
        let s = gamma_ratio_series(&g, 2);
        let predicted: f64 = s
            .coefficients
            .iter()
            .enumerate()
            .map(|(k, c)| c.to_f64() / (n as f64).powi(k as i32))
            .sum();
        assert!((scaled.to_f64() - predicted).abs() < 1e-3);
        assert!((scaled.to_f64() - 1.0).abs() < 1e-4);
    }
}

#[test]
fn gamma_derivative_matches_next_beta() {
    let h = Rational::from((1, 10_000));
    for (g, b, n) in [((1, 2), 0, 7), ((1, 3), 1, 3), ((3, 4), 2, 15)] {
        let g = Rational::from(g);
        let up = beta_integral_closed(&Rational::from(&g + &h), b, n, 160).unwrap();
        let down = beta_integral_closed(&Rational::from(&g - &h), b, n, 160).unwrap();
        let diff = (up.value.re().to_f64() - down.value.re().to_f64()) / (2.0 * h.to_f64());
        let next = beta_integral_closed(&g, b + 1, n, 160).unwrap().value.re().to_f64();
        assert!(rel(diff, next) < 1e-6, "γ={g} β={b} n={n}: {diff} vs {next}");
    }
}

#[test]
fn gamma_ratio_truncation_constant_is_stable() {
    let prec = 256;
    for (g, k) in [((1, 3), 2usize), ((1, 2), 3), ((3, 4), 4)] {
        let g = Rational::from(g);
        let s = gamma_ratio_series(&g, k);
        let consts: Vec<f64> = [100u64, 1000, 10_000]
            .iter()
            .map(|&n| {
                let nq = Rational::from(n);
                let exact = (ln_gamma(&(Rational::from(&nq + 1u32) - &g), prec).unwrap()
                    - ln_gamma(&Rational::from(&nq + 1u32), prec).unwrap())
                .exp();
                let err = Float::with_val(prec, exact - s.eval(&nq, prec).unwrap()).abs();
                let nf = Float::with_val(prec, n);
                let expo = Float::with_val(prec, &g) + (k + 1) as u32;
                (err * (nf.ln() * expo).exp()).to_f64()
            })
            .collect();
        let hi = consts.iter().cloned().fold(f64::MIN, f64::max);
        let lo = consts.iter().cloned().fold(f64::MAX, f64::min);
        assert!(lo > 0.0 && hi / lo < 1.1, "γ={g} K={k}: {consts:?}");
    }
}

#[test]
fn closed_form_coefficients_at_random_gammas() {
    for g in [(2, 7), (-5, 3), (11, 13), (1, 1000), (37, 4)] {
        let g = Rational::from(g);
        let s = gamma_ratio_series(&g, 2);
        let g2 = Rational::from(g.square_ref());
        let c1 = (g2.clone() - &g) / 2u32;
        let c2 = (Rational::from(3) * g2.clone() * &g2 - Rational::from(2) * g2.clone() * &g
            - Rational::from(3) * &g2
            + Rational::from(2) * &g)
            / 24u32;
        assert_eq!(s.coefficients[1], c1);
        assert_eq!(s.coefficients[2], c2);
    }
}
