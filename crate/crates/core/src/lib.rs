//! Exact and numerical tools for Thue, Thue–Mahler and S-unit equations.
//!
//! The crate is organised by subject:
//!
//! * [`forms`]: binary forms with integer coefficients (evaluation, invariants,
//!   factorisation over ℚ, unimodular changes of variables);
//! * [`arith`]: integer factorisation, smoothness and k-freeness;
//! * [`padic`]: valuations, Hensel lifting, local densities and local measures;
//! * [`approx`]: the reduction of a product of approximation inequalities to
//!   finitely many single-place systems, the gap principle and count bounds;
//! * [`solve`]: box-complete solvers for Thue, Thue–Mahler and S-unit equations;
//! * [`count`]: lattice-point counting functions and their asymptotic constants;
//! * [`bounds`]: evaluators for explicit solution-count and height bounds.
//!
//! Heavy enumerations go through [`exec`], which runs on rayon when the
//! `parallel` feature is enabled and reduces chunk results in a fixed order,
//! so every result is independent of the number of worker threads.

pub mod approx;
pub mod arith;
pub mod bounds;
pub mod count;
pub mod error;
pub mod exec;
pub mod forms;
pub mod interval;
pub mod json;
pub mod padic;
pub mod poly;
pub mod scan;
pub mod solve;

pub use error::{Error, Result};
pub use forms::{BinaryForm, UnimodularMap};
