//! Radially symmetric solver on a staggered Eulerian grid.

pub mod explicit;
pub mod grid;
pub mod imex;
pub mod integrals;
pub mod mollify;
pub mod profile;
pub mod run;
pub mod scenario;
pub mod scheme;
pub mod state;

pub use grid::RadialGrid;
pub use mollify::mollify_initial;
pub use profile::{DensityProfile, VelocityProfile};
pub use run::{run, RunLog, RunOptions, RunOutput};
pub use scenario::Scenario;
pub use scheme::{make_scheme, scheme_names, StepScheme};
pub use state::RadialState;
