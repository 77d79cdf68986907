//! Symbolic-numeric tools for linear difference systems at an irregular
//! singular point at infinity.
//!
//! The crate is organised bottom-up:
//!
//! * [`series`] and [`puiseux`]: truncated Laurent arithmetic in `s^{-1/p}`
//!   and in `u = exp(2πis)`, including the shift `s ↦ s+1`.
//! * [`exponents`]: the wild exponent lattice with its direction-dependent
//!   dominance order, Stokes directions and splitting thresholds.
//! * [`diffmod`]: difference modules, graded models and rank-one
//!   classification.
//! * [`formal_rh`]: the formal conjugation solver and lift residual checks.
//! * [`cocycle`]: Stokes cocycles, Laurent splitting and block
//!   factorizations.
//! * [`lambda`]: numerical solution operators for `ψ̃Λ − Λ = f`.
//! * [`gamma`]: the Gamma-function module as an end-to-end benchmark.

pub mod cocycle;
pub mod diffmod;
pub mod error;
pub mod exponents;
pub mod formal_rh;
pub mod gamma;
pub mod json;
pub mod lambda;
pub mod matrix;
pub mod puiseux;
pub mod quadrature;
pub mod series;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Complex matrix type used for numeric evaluation.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Complex column vector.
pub type CVector = nalgebra::DVector<C64>;
