//! Lagrangean flow map through stored velocity histories.

pub mod path;
pub mod probes;
pub mod source;

pub use path::{integrate_path, ParticlePath};
pub use probes::{
    holder_exponent_probe, log_lipschitz_modulus, ordering_check, osgood_integral, track_interfaces,
    write_interfaces_csv, write_path_csv, HolderFit, InterfaceTrack, OrderingReport,
};
pub use source::{uniform_knots, AnalyticField, Geometry, Lookup, PlanarHistory, Point, RadialHistory, VelocitySource};
