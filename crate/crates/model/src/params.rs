use crate::{critical_coupling, perturbativity_gp};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("critical point: ω₁² vanishes at ξ = {xi}")]
    CriticalPoint { xi: f64 },
    #[error("ξ̇ is undefined for the top-hat profile")]
    DerivativeUndefined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Profile {
    /// Product-of-tanh switch-on/off with time scale τ.
    Smooth,
    /// Instantaneous switch-on at −t₀ and switch-off at +t₀.
    IsosoTopHat,
}

impl Profile {
    pub fn name(&self) -> &'static str {
        match self {
            Profile::Smooth => "smooth",
            Profile::IsosoTopHat => "isoso",
        }
    }
}

/// How the coupling amplitude is specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    Xi0(f64),
    /// Relative to the critical coupling, `ψ = ξ₀/ξ_c`.
    Psi(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioParams {
    pub omega_s: f64,
    pub omega_e: f64,
    pub xi0: f64,
    pub t0: f64,
    pub tau: f64,
    pub profile: Profile,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    pub xi_c: f64,
    pub w: f64,
    pub psi: f64,
    pub g_p: f64,
    /// `ω_S/(ω_E − ω_S)`; `None` when the frequencies coincide.
    pub t_omega: Option<f64>,
    pub t_in: f64,
}

impl ScenarioParams {
    pub fn new(
        omega_s: f64,
        omega_e: f64,
        coupling: Coupling,
        t0: f64,
        tau: f64,
        profile: Profile,
    ) -> Result<Self, ModelError> {
        let xi0 = match coupling {
            Coupling::Xi0(x) => x,
            Coupling::Psi(psi) => psi * omega_s * omega_e,
        };
        let p = ScenarioParams {
            omega_s,
            omega_e,
            xi0,
            t0,
            tau,
            profile,
        };
        p.validate()?;
        Ok(p)
    }

    /// Smooth profile with the coupling given relative to `ξ_c`.
    pub fn smooth(omega_s: f64, omega_e: f64, psi: f64, t0: f64, tau: f64) -> Result<Self, ModelError> {
        Self::new(omega_s, omega_e, Coupling::Psi(psi), t0, tau, Profile::Smooth)
    }

    /// Top-hat profile with the coupling given relative to `ξ_c`.
    pub fn isoso(omega_s: f64, omega_e: f64, psi: f64, t0: f64) -> Result<Self, ModelError> {
        Self::new(omega_s, omega_e, Coupling::Psi(psi), t0, 0.0, Profile::IsosoTopHat)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |m: &str| Err(ModelError::InvalidParams(m.to_string()));
        if !(self.omega_s > 0.0 && self.omega_s.is_finite()) {
            return bad("omega_s must be positive");
        }
        if !(self.omega_e > 0.0 && self.omega_e.is_finite()) {
            return bad("omega_e must be positive");
        }
        if !(self.xi0 >= 0.0 && self.xi0.is_finite()) {
            return bad("coupling amplitude must be non-negative");
        }
        if !(self.t0 > 0.0 && self.t0.is_finite()) {
            return bad("t0 must be positive");
        }
        if self.profile == Profile::Smooth && !(self.tau > 0.0 && self.tau.is_finite()) {
            return bad("tau must be positive for the smooth profile");
        }
        Ok(())
    }

    pub fn psi(&self) -> f64 {
        self.xi0 / critical_coupling(self)
    }

    pub fn w(&self) -> f64 {
        self.omega_s / self.omega_e
    }

    pub fn is_supercritical(&self) -> bool {
        self.xi0 > critical_coupling(self)
    }

    /// Start of the integration window.
    pub fn t_in(&self) -> f64 {
        match self.profile {
            Profile::Smooth => -self.t0 - 20.0 * self.tau,
            Profile::IsosoTopHat => -self.t0,
        }
    }

    /// Largest second normal frequency reached, i.e. at `ξ = ξ₀`.
    pub fn omega2_max(&self) -> f64 {
        let (s2, e2) = (self.omega_s.powi(2), self.omega_e.powi(2));
        let r = (e2 - s2).hypot(2.0 * self.xi0);
        (0.5 * (s2 + e2 + r)).sqrt()
    }

    pub fn derived(&self) -> DerivedParams {
        let t_omega = if self.omega_e != self.omega_s {
            Some(self.omega_s / (self.omega_e - self.omega_s))
        } else {
            None
        };
        DerivedParams {
            xi_c: critical_coupling(self),
            w: self.w(),
            psi: self.psi(),
            g_p: perturbativity_gp(self),
            t_omega,
            t_in: self.t_in(),
        }
    }

    pub fn with_tau(&self, tau: f64) -> Self {
        ScenarioParams { tau, ..*self }
    }

    pub fn with_xi0(&self, xi0: f64) -> Self {
        ScenarioParams { xi0, ..*self }
    }

    pub fn with_profile(&self, profile: Profile) -> Self {
        ScenarioParams { profile, ..*self }
    }

    /// Moves `ω_E` while keeping `ψ` fixed.
    pub fn with_omega_e_fixed_psi(&self, omega_e: f64) -> Self {
        let psi = self.psi();
        ScenarioParams {
            omega_e,
            xi0: psi * self.omega_s * omega_e,
            ..*self
        }
    }
}
