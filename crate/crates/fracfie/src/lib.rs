//! Numerical toolkit for nonlinear integral equations with a weakly singular
//! kernel of the form `(U(xi) - U(eta))^(delta-1)` and a multiplicative weight.
//!
//! The crate is organized as:
//!
//! - [`special`]: the Gamma function.
//! - [`fraccalc`]: weighted fractional integrals and derivatives with respect
//!   to another function, discretized by product-trapezoidal quadrature on a
//!   uniform grid.
//! - [`mnc`]: measure-of-noncompactness diagnostics on finite families of
//!   sampled functions (moduli of continuity, Hausdorff estimate, Darbo-type
//!   contraction checks).
//! - [`solver`]: the fixed-point operator of the integral equation, Picard
//!   iteration, and numerical verification of the solvability hypotheses.
//! - [`problems`]: built-in example problems, a JSON problem-file format, and
//!   a small arithmetic expression parser.
//!
//! With the default `parallel` feature the inner per-node loops run on rayon;
//! disable default features for a fully sequential build.

pub mod error;
mod exec;
pub mod fraccalc;
pub mod mnc;
pub mod problems;
pub mod solver;
pub mod special;

pub use error::{Error, Result};
pub use fraccalc::{GridFunction, KernelSpec, WarpFunction, WeightFunction};
