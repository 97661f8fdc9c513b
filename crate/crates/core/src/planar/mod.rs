//! Doubly periodic planar fields and the identity checks built on them.

pub mod field;
pub mod identities;
pub mod io;
pub mod spectral;

pub use field::{FieldKind, MatrixField, ScalarField, VectorField};
pub use identities::{
    data_functionals, effective_flux_field, material_acceleration, verify_decomposition, vorticity,
    DecompositionReport, FieldFrame, Forcing, FunctionalRecord,
};
pub use io::{read_field, write_field, PlanarField};
