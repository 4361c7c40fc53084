//! Exact classical and hyperbolic Dedekind and Rademacher symbols on SL2(Z).
//!
//! The exact layers (`exact_arith`, `modular_group`, `contfrac`, `qforms`,
//! `symbols_classical`, `symbols_hyperbolic`) work over arbitrary precision
//! integers. `analytic` is double precision and only corroborates the exact
//! results numerically.

pub mod analytic;
pub mod contfrac;
pub mod error;
pub mod exact_arith;
pub mod modular_group;
pub mod qforms;
pub mod selftest;
pub mod symbols_classical;
pub mod symbols_hyperbolic;
mod util;

pub use error::{Error, Result};
pub use exact_arith::{mobius_apply, qi_compare, qi_conjugate, Proj, QuadIrr, Rational, Real};
pub use modular_group::Mat2;
pub use qforms::{FormClass, BQF};
