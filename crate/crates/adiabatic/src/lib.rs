//! Adiabatic (slow-switching) expansion of the system purity.
//!
//! Leading order tracks the instantaneous normal-mode vacuum; the first
//! non-adiabatic correction adds particle creation in each normal mode and
//! the mixing between them. Both vanish once the coupling is off, so the
//! late-time purity loss has to be measured with the exact integrator.

mod latetime;
mod nlo;
mod phases;

pub use latetime::{
    latetime_loss, latetime_purity, log_log_slopes, nonanalyticity_slope, recoherence_threshold_scan, write_scan_csv,
    SlopePoint, ThresholdPoint, ThresholdScan, RESOLUTION_TOL,
};
pub use nlo::{nlo_contributions, nlo_integrals, nlo_series, purity_adiabatic_lo, purity_nlo_correction, NloIntegrals};
pub use phases::{accumulate_phases, phase_grid, AdiabaticConfig, PhaseAccumulator};

use cho_model::ModelError;
use cho_transport::quad::QuadError;
use cho_transport::TransportError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AdiabaticError {
    #[error("coupling becomes supercritical at t = {t}; the adiabatic expansion needs ω₁² > 0")]
    SupercriticalExcursion { t: f64 },
    #[error("critical point: ω₁ vanishes at t = {t}")]
    CriticalPoint { t: f64 },
    #[error("the adiabatic expansion needs a smooth coupling profile")]
    NonSmoothProfile,
    #[error("no threshold: the recoherence criterion is never met at τ/t₀ = {tau_over_t0}")]
    NoThreshold { tau_over_t0: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error(transparent)]
    Model(#[from] ModelError),
}
