//! Numerical companion to a local-randomization construction of zero-free
//! regions for the Riemann zeta function.
//!
//! The crate evaluates every concrete quantity of the construction at desk
//! scale: prime tables, shifted Dirichlet polynomials over primes and their
//! certified suprema, the linear-spacing coefficient, moment and Hilbert
//! inequalities, the exact parameter pipeline with the Chebyshev good-shift
//! estimate and covering count, plus an independent zeta oracle.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod cli;
pub mod dirichlet;
pub mod error;
pub mod inequalities;
pub mod interval;
pub mod phase;
pub mod pipeline;
pub mod primes;
pub mod quadrature;
pub mod spacing;
pub mod zeta;

pub use error::{Error, Result};
pub use interval::Interval;
