//! Exact solution of the top-hat ("instantaneous switch-on/switch-off")
//! coupling: Bogoliubov matching at the window edge, normal-mode
//! correlators, the resulting system purity, and the leading-order
//! expansions valid in each corner of the `(w, ψ)` plane.

mod bogoliubov;
mod expansions;
mod purity;

pub use bogoliubov::{bogoliubov_coeffs, BCorrelators, BogoliubovSet, Ladder};
pub use expansions::{check_case_domain, regime_purity, ExpansionCase, ExpansionFormula};
pub use purity::{decoherence_rate, isoso_purity, isoso_sigma_s, write_csv, IsosoSolution};

use cho_model::ModelError;
use cho_symplectic::SymplecticError;

/// `|ψ − 1|` below which the closed form is refused.
pub const CRITICAL_GUARD: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IsosoError {
    #[error("coupling within {CRITICAL_GUARD:e} of critical (ψ = {psi}); use the numerical integrator")]
    CriticalPoint { psi: f64 },
    #[error("expansion {case} used outside its domain: {reason}")]
    InvalidCase { case: &'static str, reason: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    NonPhysical(#[from] SymplecticError),
}
