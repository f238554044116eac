use std::collections::BTreeMap;
use std::fmt;

use rug::{Float, Integer, Rational};

use super::special::polygamma_real;
use crate::error::{Error, Result};

/// Largest `β` accepted by [`p_beta_polynomial`].
pub const MAX_BETA: u32 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PsiArg {
    /// `n + 1 - γ`
    Shifted,
    /// `γ`
    Gamma,
}

/// `ψ^{(order)}(arg)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PsiSymbol {
    pub arg: PsiArg,
    pub order: u32,
}

impl fmt::Display for PsiSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("\\psi")?;
        if self.order > 0 {
            write!(f, "^{{({})}}", self.order)?;
        }
        match self.arg {
            PsiArg::Gamma => f.write_str("(\\gamma)"),
            PsiArg::Shifted => f.write_str("(n+1-\\gamma)"),
        }
    }
}

/// A product of powers of polygamma symbols.
pub type PsiMonomial = BTreeMap<PsiSymbol, u32>;

/// Polynomial with rational coefficients in the polygamma symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PolygammaPolynomial {
    pub beta: u32,
    pub terms: BTreeMap<PsiMonomial, Rational>,
}

fn mono_mul(a: &PsiMonomial, b: &PsiMonomial) -> PsiMonomial {
    let mut out = a.clone();
    for (s, e) in b {
        *out.entry(*s).or_insert(0) += e;
    }
    out
}

impl PolygammaPolynomial {
    pub fn constant(beta: u32, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(PsiMonomial::new(), c);
        }
        PolygammaPolynomial { beta, terms }
    }

    fn add_term(&mut self, m: PsiMonomial, c: Rational) {
        let slot = self.terms.entry(m).or_default();
        *slot += c;
        if *slot == 0 {
            self.terms.retain(|_, v| *v != 0);
        }
    }

    fn mul(&self, other: &Self) -> Self {
        let mut out = PolygammaPolynomial::constant(self.beta, Rational::new());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(mono_mul(ma, mb), Rational::from(ca * cb));
            }
        }
        out
    }

    fn add_scaled(&mut self, other: &Self, s: &Rational) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), Rational::from(c * s));
        }
    }

    /// Value at rational `γ` and natural `n`; needs `0 < γ < n+1`.
    pub fn eval(&self, gamma: &Rational, n: u64, prec: u32) -> Result<Float> {
        let shifted = Rational::from(n + 1) - gamma;
        if *gamma <= 0 || shifted <= 0 {
            return Err(Error::Precondition(format!(
                "polygamma arguments need 0 < γ < n+1 (γ = {gamma}, n = {n})"
            )));
        }
        let work = prec + 16;
        let mut cache: BTreeMap<PsiSymbol, Float> = BTreeMap::new();
        let mut total = Float::with_val(work, 0);
        for (m, c) in &self.terms {
            let mut t = Float::with_val(work, c);
            for (s, e) in m {
                let v = cache.entry(*s).or_insert_with(|| {
                    let x = match s.arg {
                        PsiArg::Gamma => gamma,
                        PsiArg::Shifted => &shifted,
                    };
                    polygamma_real(s.order, x, work)
                });
                for _ in 0..*e {
                    t *= &*v;
                }
            }
            total += t;
        }
        Ok(Float::with_val(prec, total))
    }
}

impl fmt::Display for PolygammaPolynomial {
    /// LaTeX with terms in canonical order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = *c < 0;
            let a = Rational::from(c.abs_ref());
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if m.is_empty() || a != 1 {
                write!(f, "{a}")?;
                if !m.is_empty() {
                    f.write_str(" ")?;
                }
            }
            for (j, (s, e)) in m.iter().enumerate() {
                if j > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{s}")?;
                if *e > 1 {
                    if *e < 10 {
                        write!(f, "^{e}")?;
                    } else {
                        write!(f, "^{{{e}}}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// `∂_γ^β B(γ, n+1-γ) / B(γ, n+1-γ)` as a polynomial in polygamma values.
pub fn p_beta_polynomial(beta: u32) -> Result<PolygammaPolynomial> {
    if beta > MAX_BETA {
        return Err(Error::InvalidInput(format!(
            "beta = {beta} exceeds the supported maximum {MAX_BETA}"
        )));
    }
    // x_j = d^j/dγ^j log B = ψ^{(j-1)}(γ) + (-1)^j ψ^{(j-1)}(n+1-γ)
    let x: Vec<PolygammaPolynomial> = (1..=beta)
        .map(|j| {
            let mut p = PolygammaPolynomial::constant(beta, Rational::new());
            let g = PsiSymbol { arg: PsiArg::Gamma, order: j - 1 };
            let s = PsiSymbol { arg: PsiArg::Shifted, order: j - 1 };
            p.add_term(BTreeMap::from([(g, 1)]), Rational::from(1));
            p.add_term(
                BTreeMap::from([(s, 1)]),
                Rational::from(if j % 2 == 0 { 1 } else { -1 }),
            );
            p
        })
        .collect();
    // complete Bell polynomials: Y_{m+1} = Σ_i binom(m, i) x_{i+1} Y_{m-i}
    let mut y = vec![PolygammaPolynomial::constant(beta, Rational::from(1))];
    for m in 0..beta as usize {
        let mut next = PolygammaPolynomial::constant(beta, Rational::new());
        let mut binom = Integer::from(1);
        for i in 0..=m {
            next.add_scaled(&x[i].mul(&y[m - i]), &Rational::from(&binom));
            binom *= (m - i) as u32;
            binom /= (i + 1) as u32;
        }
        y.push(next);
    }
    let mut out = y.pop().unwrap();
    out.beta = beta;
    Ok(out)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Syntax {
            line: 1,
            column: self.pos + 1,
            message: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, lit: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(lit.as_bytes()) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, lit: &str) -> Result<()> {
        if self.eat(lit) {
            Ok(())
        } else {
            Err(self.err(&format!("expected {lit:?}")))
        }
    }

    fn number(&mut self) -> Option<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).ok()?.parse().ok()
    }

    fn exponent(&mut self) -> Result<u32> {
        if !self.eat("^") {
            return Ok(1);
        }
        let e = if self.eat("{") {
            let e = self.number();
            self.expect("}")?;
            e
        } else {
            self.skip_ws();
            match self.src.get(self.pos) {
                Some(c) if c.is_ascii_digit() => {
                    self.pos += 1;
                    Some(u64::from(c - b'0'))
                }
                _ => None,
            }
        };
        e.and_then(|e| u32::try_from(e).ok())
            .ok_or_else(|| self.err("expected an exponent"))
    }

    fn symbol(&mut self) -> Result<PsiSymbol> {
        let mut order = 0;
        if self.eat("^") {
            self.expect("{")?;
            self.expect("(")?;
            order = self
                .number()
                .and_then(|k| u32::try_from(k).ok())
                .ok_or_else(|| self.err("expected a derivative order"))?;
            self.expect(")")?;
            self.expect("}")?;
        }
        self.expect("(")?;
        let arg = if self.eat("\\gamma") {
            PsiArg::Gamma
        } else if self.eat("n") {
            self.expect("+")?;
            self.expect("1")?;
            self.expect("-")?;
            self.expect("\\gamma")?;
            PsiArg::Shifted
        } else {
            return Err(self.err("expected \\gamma or n+1-\\gamma"));
        };
        self.expect(")")?;
        Ok(PsiSymbol { arg, order })
    }

    fn term(&mut self) -> Result<(PsiMonomial, Rational)> {
        let mut coeff = Rational::from(1);
        let mut seen = false;
        if let Some(p) = self.number() {
            seen = true;
            coeff = Rational::from(p);
            if self.eat("/") {
                let q = self.number().ok_or_else(|| self.err("expected a denominator"))?;
                if q == 0 {
                    return Err(self.err("zero denominator"));
                }
                coeff /= q;
            }
        }
        let mut m = PsiMonomial::new();
        loop {
            self.eat("\\cdot");
            if !self.eat("\\psi") {
                break;
            }
            seen = true;
            let s = self.symbol()?;
            let e = self.exponent()?;
            *m.entry(s).or_insert(0) += e;
        }
        if !seen {
            return Err(self.err("expected a term"));
        }
        Ok((m, coeff))
    }
}

/// Reads a polynomial written like the displays `p_2(n) = \psi(n+1-\gamma)^2 + ...`.
/// A leading `p_k(n) =` is accepted and sets `beta`.
pub fn parse_polygamma_latex(text: &str) -> Result<PolygammaPolynomial> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let mut beta = 0;
    if p.eat("p_") {
        beta = p
            .number()
            .and_then(|b| u32::try_from(b).ok())
            .ok_or_else(|| p.err("expected an index after p_"))?;
        p.eat("(n)");
        p.expect("=")?;
    }
    let mut out = PolygammaPolynomial::constant(beta, Rational::new());
    let mut first = true;
    loop {
        p.skip_ws();
        if p.pos >= p.src.len() {
            if first {
                return Err(p.err("empty polynomial"));
            }
            break;
        }
        let sign = if p.eat("+") {
            1
        } else if p.eat("-") {
            -1
        } else if first {
            1
        } else {
            return Err(p.err("expected + or -"));
        };
        let (m, c) = p.term()?;
        out.add_term(m, c * sign);
        first = false;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_orders() {
        assert_eq!(p_beta_polynomial(0).unwrap().to_string(), "1");
        assert_eq!(
            p_beta_polynomial(1).unwrap().to_string(),
            "-\\psi(n+1-\\gamma) + \\psi(\\gamma)"
        );
        let p2 = p_beta_polynomial(2).unwrap();
        assert_eq!(p2.terms.len(), 5);
    }

    #[test]
    fn display_roundtrips_through_parser() {
        for b in 0..=5 {
            let p = p_beta_polynomial(b).unwrap();
            let mut q = parse_polygamma_latex(&p.to_string()).unwrap();
            q.beta = b;
            assert_eq!(p, q, "beta = {b}");
        }
    }

    #[test]
    fn third_order_term_count() {
        // β = 3: x1^3 + 3 x1 x2 + x3, each x_j has two symbols
        let p = p_beta_polynomial(3).unwrap();
        assert_eq!(p.terms.len(), 4 + 4 + 2);
    }

    #[test]
    fn guard() {
        assert!(p_beta_polynomial(MAX_BETA).is_ok());
        assert!(p_beta_polynomial(MAX_BETA + 1).is_err());
    }

    #[test]
    fn parse_errors() {
        assert!(parse_polygamma_latex("").is_err());
        assert!(parse_polygamma_latex("\\psi(x)").is_err());
        assert!(parse_polygamma_latex("\\psi(\\gamma) \\psi").is_err());
        match parse_polygamma_latex("1 + + 2") {
            Err(Error::Syntax { column, .. }) => assert!(column >= 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn eval_p1_is_digamma_difference() {
        let g = Rational::from((1, 2));
        let p = p_beta_polynomial(1).unwrap();
        let v = p.eval(&g, 0, 128).unwrap();
        // ψ(1/2) - ψ(1/2) = 0
        assert!(v.to_f64().abs() < 1e-35);
        assert!(p.eval(&Rational::from(3), 1, 64).is_err());
    }
}
