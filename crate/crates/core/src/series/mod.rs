//! Nilsson monomials, the `Ω` order, truncated series and the factored
//! expansion `Σ_λ λⁿ Σ S_{λ,α,β} (log n)^β n^{-α} g(1/n)`.

mod expansion;
mod omega;

pub use expansion::{
    expansion_canonical_equal, expansion_minimize, expansion_partial_sum, CoefficientMatrix,
    ExpansionTerm, NilssonExpansion, TruncatedSeries, DEFAULT_PRECISION,
};
pub use omega::{monomial_eval, omega_cmp, NilssonMonomial, OmegaIndex};
