//! Fundamental solutions of `-y'' + p y' + q y = lambda^2 rho y` on `[a, b]`
//! where `q` is a first-order distribution given through its antiderivative
//! `u`, together with the quasi-derivatives and the remainders against the
//! WKB-type leading terms `rho^{-1/4} exp(P/2 +- i lambda int sqrt(rho))`.
//!
//! The pipeline is
//! [`problem`] / [`coefficients`] -> [`liouville`] -> [`volterra`] ->
//! [`solutions`], with independent references in [`oracle`].

// `!(a <= b)` is used deliberately so that NaN fails range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod coefficients;
pub mod error;
pub mod liouville;
pub mod oracle;
pub mod problem;
pub mod quadrature;
pub mod solutions;
pub mod volterra;

pub use error::{Error, Result};
pub use num_complex::Complex64;
