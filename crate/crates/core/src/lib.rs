//! Numerical laboratory for two-dimensional barotropic compressible
//! Navier-Stokes flow with a density-dependent bulk viscosity.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blowup;
pub mod diagnostics;
pub mod error;
pub mod flow;
pub mod format;
pub mod material;
pub mod planar;
pub mod quadrature;
pub mod radial;
pub mod runner;

pub use error::{Error, Result};
pub use material::{DensityLaw, MaterialLaw};
