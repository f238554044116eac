//! Balanced multisums `a_n = Σ_k C_0^n ∏ C_i^{k_i} ∏ A_j(n,k)!^{ε_j}`:
//! term model, balance check, support enumeration and exact evaluation.

mod gfunc;
mod term;

pub use gfunc::{gfunction_diagnostic, GReport};
pub use term::{
    check_balanced, enumerate_support, eval_multisum, BalanceReport, BalancedTerm, Factor,
    LinearForm, SupportSet, SUPPORT_CAP,
};
