//! Exact numerical evolution of the joint covariance matrix.

pub mod ode;
pub mod quad;
mod run;
mod state;

pub use run::{
    coupling_cutoff_time, integrate, integrate_at, integrate_with, isoso_reference_params, isoso_reference_run,
    run_summary, sample_times, IntegratorConfig, RunSummary, StepStats, TEndPolicy, Trajectory, TransportError,
};
pub use state::{generator, transport_rhs, transport_rhs_xi, vacuum_initial, CovarianceState};
