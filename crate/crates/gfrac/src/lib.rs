//! Radial solver and verification suite for a nonlocal Neumann problem with
//! Orlicz-type growth on the unit ball.
//!
//! The equation is `(-Δ_g)^s u + u = |u|^{p-2} u` in `B_1 ⊂ R^N` with the
//! nonlocal Neumann condition `N_g u = 0` outside the closed ball, where
//! `(-Δ_g)^s` is the fractional operator driven by a Young function `G`
//! with `g = G'`. Everything is restricted to radial profiles and the cone
//! `K` of non-negative, radially non-decreasing functions, where the
//! variational structure is well behaved.
//!
//! Module map:
//! * [`young`] — Young-function algebra and structural inequality checks.
//! * [`grid`] — radial/angular quadrature tables and the Neumann closure.
//! * [`quadrature`] — the nonlocal modular, its first variation, the
//!   Luxemburg seminorm and a Monte Carlo cross-check.
//! * [`energy`] — the energy functional, norms and weak residuals.
//! * [`cone`] — projections onto the monotone cone and the zero-mean
//!   unit-norm constraint set.
//! * [`solver`] — mountain-pass deformation, the convex auxiliary problem
//!   and the fixed-point cross-validation.
//! * [`analysis`] — nonconstancy diagnostics: the Λ infimum, the threshold
//!   inequality and the scaled-path second-order test.
//! * [`cli`] — batch subcommands with JSON/CSV reports.

pub mod analysis;
pub mod cli;
pub mod cone;
pub mod energy;
pub mod error;
pub mod grid;
pub mod profile;
pub mod quadrature;
pub mod report;
pub mod sampling;
pub mod solver;
pub mod young;

pub use error::{Error, Result};
