//! The two-oscillator model: parameters, the switch-on/off coupling `ξ(t)`,
//! the instantaneous normal-mode ("adiabatic") frame and the regime map.

mod coupling;
mod frame;
mod params;
mod regime;

pub use coupling::{coupling_xi, coupling_xi_dot, hamiltonian, lambda, ln_cosh};
pub use frame::{adiabatic_frame, AdiabaticFrame};
pub use params::{Coupling, DerivedParams, ModelError, Profile, ScenarioParams};
pub use regime::{classify_regime, perturbativity_gp_wpsi, secular_time, Regime, RegimeLabel, RegimeThresholds};

/// `ξ_c = ω_S ω_E`.
pub fn critical_coupling(p: &ScenarioParams) -> f64 {
    p.omega_s * p.omega_e
}

/// `g_p = ξ₀ / √(2 ω_S ω_E (ω_S² + ω_E²))`.
pub fn perturbativity_gp(p: &ScenarioParams) -> f64 {
    let (ws, we) = (p.omega_s, p.omega_e);
    p.xi0 / (2.0 * ws * we * (ws * ws + we * we)).sqrt()
}
