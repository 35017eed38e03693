//! Numerical building blocks for studying how Schrödinger propagators
//! `exp(-it(-Δ + V))` react to potentials that are small in `L^p` but not in
//! `L^∞`.
//!
//! Three geometries are supported: the unit sphere S² (spherical harmonics on a
//! Gauss–Legendre grid, plus zonal colatitude rules for axisymmetric work), a
//! periodic box standing in for ℝ³ (FFT), and a surface of revolution
//! `[a,b] × S¹` with metric `dt² + f(t)² dθ²` (finite-difference
//! Sturm–Liouville).
//!
//! * [`discretization`] — grids, quadrature, transforms.
//! * [`quasimodes`] — equatorial harmonics, concentration measures, radial modes.
//! * [`potentials`] — shrinking equatorial cutoffs, scaled bump pairs, `L^p` norms.
//! * [`propagator`] — Hamiltonian blocks, dense / Krylov / split-step evolution,
//!   propagator distances and Duhamel diagnostics.

// `!(x > 0.0)` guards are deliberate: they reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod discretization;
pub mod error;
pub mod potentials;
pub mod propagator;
pub mod quasimodes;
pub mod special;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
