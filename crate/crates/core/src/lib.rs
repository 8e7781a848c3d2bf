//! Quantum spectra and Ehrenfest-frequency scaling for one-dimensional
//! polynomial single- and double-well Hamiltonians.
//!
//! The crate computes, in rescaled units (`m = 1`, `B = 1`, `A ∈ {0, -1}`):
//!
//! * classical quantities of the wells (turning points, enclosed phase-space
//!   area, periods, Weyl state counts) — [`model`];
//! * selected eigenpairs of `H = -ħ²/2 d²/dq² + V(q)` at large quantum
//!   numbers via a parity-reduced Numerov shooting solver, with an
//!   independent dense finite-difference oracle — [`spectrum`];
//! * closed-form WKB levels and overlap weights for single wells, the
//!   barrier-top-regularized quantization for the `α = 1` double well, and
//!   the `ħ → 0` limit distribution of the survival-probability spectrum —
//!   [`semiclassics`];
//! * wave-packet overlaps, survival probability, its frequency spectrum and
//!   the Ehrenfest frequency `ν_E` — [`dynamics`];
//! * ħ sweeps across interchangeable estimation methods plus scaling-law
//!   fits — [`sweep`].
//!
//! All computations are deterministic; no random number generation is used
//! anywhere.

// quadrature tables keep their full published precision, and `!(x > 0.0)`
// argument guards intentionally reject NaN along with nonpositive values
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod io;
pub mod model;
pub mod quad;
pub mod semiclassics;
pub mod specfun;
pub mod spectrum;
pub mod sweep;

pub use error::{Error, Result};
