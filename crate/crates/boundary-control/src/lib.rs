//! Spectral simulation and control synthesis for quantum systems whose
//! control knob is the boundary condition itself.
//!
//! A particle on an interval with time-dependent quasi-periodic boundary
//! conditions is unitarily equivalent, through a gauge transformation, to a
//! particle with periodic boundary conditions in a time-dependent magnetic
//! Hamiltonian. This crate realizes that equivalence numerically:
//!
//! - [`spectral`] — truncated plane-wave basis, magnetic Laplacian and
//!   position operators, deterministic eigendecomposition.
//! - [`gauge`] — the multiplication map `e^{iAx}` between the boundary and
//!   magnetic pictures, boundary-condition matrices and diagnostics.
//! - [`propagator`] — piecewise-frozen evolution operators for
//!   `H(t) = Σ fᵢ(t) Hᵢ`, adaptive refinement, and numerical certification
//!   of the perturbation bound between nearby coefficient families.
//! - [`control`] — controllability screening (normality, gap rational
//!   independence, couplings), spectral perturbations, piecewise-constant
//!   pulse synthesis, vector-potential reconstruction, mollification.
//! - [`runner`] — configuration parsing, command orchestration, and
//!   deterministic CSV/JSON/binary artifact output.
//!
//! The `boundary-ctrl` binary exposes the runner as a CLI; the `examples/`
//! directory holds one runnable walkthrough per capability.

pub mod error;
pub mod linalg;
pub mod gauge;
pub mod propagator;
pub mod spectral;

pub use error::{Error, Result};
