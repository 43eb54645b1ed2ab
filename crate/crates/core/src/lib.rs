//! Numerical laboratory for the forced porous medium equation
//! `∂_t u − Δ u^{[m]} = S`: grids and Littlewood–Paley blocks, exact
//! solutions, monotone solvers, the kinetic formulation with its dissipation
//! audits, and fractional-regularity estimators.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dyadic;
pub mod exact;
pub mod error;
pub mod fourier;
pub mod grid;
pub mod kinetic;
pub mod nonlinear;
pub mod solvers;
pub mod spectral;

pub use dyadic::{lp_blocks, lp_project, make_partition, DyadicPartition};
pub use error::{Error, Result};
pub use fourier::{dft_forward, dft_inverse, Spectrum};
pub use grid::{Boundary, Field, Grid};
pub use nonlinear::signed_power;
