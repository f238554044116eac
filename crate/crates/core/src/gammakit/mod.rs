//! Γ-function tools: the Γ-ratio series in powers of `1/n`, the polygamma
//! polynomials `p_β`, Beta-type integrals in closed form and by quadrature,
//! and `ψ^{(k)}`, `log Γ` at rational arguments.

mod bernoulli;
mod beta;
mod pbeta;
mod ratio;
mod special;

pub use bernoulli::{bernoulli_numbers, bernoulli_polynomial};
pub use beta::{beta_integral_closed, beta_integral_quad, BetaIntegralValue};
pub use pbeta::{
    p_beta_polynomial, parse_polygamma_latex, PolygammaPolynomial, PsiArg, PsiMonomial,
    PsiSymbol, MAX_BETA,
};
pub use ratio::{gamma_ratio_polynomials, gamma_ratio_series, GammaRatioSeries};
pub use special::{ln_gamma, polygamma};
