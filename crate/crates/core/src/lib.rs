//! Nilsson-type asymptotic expansions of sequences.
//!
//! The crate covers three routes to the asymptotics of a sequence
//! `a_n ~ Σ λⁿ n^{-α} (log n)^β S g(1/n)`:
//!
//! * exact formal solutions of a linear recurrence with polynomial
//!   coefficients ([`recurrence`]),
//! * exact evaluation of balanced multisums followed by high-precision
//!   numerical fitting ([`multisum`], [`extract`]),
//! * the Beta-integral and Gamma-ratio formulas ([`gammakit`]).
//!
//! [`series`] holds the expansion data model shared by all of them.

pub mod cli;
pub mod error;
pub mod exactnum;
pub mod extract;
pub mod gammakit;
pub mod io;
pub mod multisum;
pub mod recurrence;
pub mod series;

pub use error::{Error, ErrorKind, Result};
