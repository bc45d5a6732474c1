//! Spectral decomposition, resolvent continuation, resonances and residue
//! representations of the positive Capelli operator for the dual pairs
//! `(O(1,1), Sp₂(ℝ))` and `(Sp₂(ℝ), O_{p,p})`, together with the metaplectic
//! normalisation formulas they rely on.
//!
//! Module map:
//! - [`numerics`]: quadrature, Bessel functions, contours, test functions;
//! - [`mellin`]: the dilation (Mellin) transform on `L²(ℝ²)`;
//! - [`o11_resolvent`]: resolvent of `C⁺ = −(E+1)²`, continuation and residue;
//! - [`o11_rep`]: the `O(1,1)` action, Bessel closed forms, Weil-representation
//!   formulas on `M_{2,2}`;
//! - [`sl2`]: the `SL(2,ℝ)` side — Casimir/Capelli operators, orbital
//!   integrals, the continued model resolvent, resonances and K-types;
//! - [`diffop`]: exact polynomial-coefficient differential operators;
//! - [`cli`]: experiment runner.

// `!(x > 0.0)` is used deliberately so that NaN fails validation; reference
// constants are written with every digit of their published values.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod cli;
pub mod diffop;
pub mod error;
pub mod mellin;
pub mod numerics;
pub mod o11_rep;
pub mod o11_resolvent;
pub mod sl2;

pub use error::{Error, Result};
pub use num_complex::Complex64;
