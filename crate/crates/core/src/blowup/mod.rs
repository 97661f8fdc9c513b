//! Finite-lifespan machinery for compactly supported data: the functional
//! `H(t)`, its differential inequality, and the contradiction time `T*`.

pub mod functional;
pub mod lifespan;
pub mod report;

pub use functional::{
    centered_differences, h_derivative_formula, h_functional, h_functional_profile,
    inequality_margin, inequality_rhs, require_blowup_hypotheses, support_area, wall_stress_term, MarginSeries,
};
pub use lifespan::{
    aux_branch, aux_f, contradiction_time, g_bound, monotonicity_scan, AuxBranch, Lifespan,
    LifespanInput, MonotonicityScan, ScanParam,
};
pub use report::{blowup_report, BlowupReport};
