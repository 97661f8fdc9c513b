//! Quantitative diagnostics extracted from radial runs.

pub mod annulus;
pub mod decay;
pub mod energy;
pub mod jumps;
pub mod particle;
pub mod summary;
pub mod vacuum;

pub use annulus::{
    annulus_velocity_check, fit_annulus_law, interface_divergence, two_fluid_energy_balance, two_fluid_rhs,
    AnnulusFit, TwoFluidRecord,
};
pub use decay::{compare_decay, lambda_jump_decay, track_jump, DecayComparison};
pub use energy::{energy_report, EnergyReport};
pub use jumps::{detect_jumps, jump_at, manufactured_jump, JumpRecord, JumpScan};
pub use particle::{particle_ode_residual, ParticleOdeRecord};
pub use summary::{CheckEntry, CheckSummary};
pub use vacuum::{default_eps_vac, vacuum_report, VacuumReport};
