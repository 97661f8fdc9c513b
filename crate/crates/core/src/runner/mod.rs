//! Config-driven runs, sweeps and the acceptance suite.

pub mod check;
pub mod config;
pub mod execute;
pub mod replay;
pub mod snapshot;
pub mod sweep;
pub mod synthetic;

pub use check::{criteria, render_table, run_check, Outcome};
pub use config::RunConfig;
pub use execute::{execute, ExecuteOptions, RunManifest, RunReport};
pub use replay::{blowup_command, load_run_dir, paths_command};
pub use sweep::{expand, run_sweep, SetOverride, SweepSummary};
