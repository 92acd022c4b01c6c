//! Time stepping, trajectories and the studies built on them.
//!
//! The scheme is the integrating-factor (Lawson) fourth-order Runge-Kutta
//! method around the exact propagator `exp((i mu(n) - epsilon n^6) t)`.

mod scheme;
mod studies;
mod trajectory;

pub use scheme::{
    evolve, evolve_backward, evolve_final, nonlinear_stiffness, step, EvolveConfig, Stepper,
};
pub use studies::{
    gauge_equivalence, parabolic_family, parabolic_linear_distance, rescale_datum, scaling_check, self_convergence,
    ConvergenceReport, EquivalenceReport, ParabolicReport,
};
pub use trajectory::{Flow, MonitorRecord, Snapshot, Trajectory};
