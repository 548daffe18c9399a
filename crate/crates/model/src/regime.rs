use std::fmt;

use crate::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    U1,
    U2a,
    U2b,
    C1Plus,
    C1Minus,
    C2Plus,
    C2Minus,
    O1a,
    O1b,
    O2,
}

impl Regime {
    pub const ALL: [Regime; 10] = [
        Regime::U1,
        Regime::U2a,
        Regime::U2b,
        Regime::C1Plus,
        Regime::C1Minus,
        Regime::C2Plus,
        Regime::C2Minus,
        Regime::O1a,
        Regime::O1b,
        Regime::O2,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Regime::U1 => "U1",
            Regime::U2a => "U2a",
            Regime::U2b => "U2b",
            Regime::C1Plus => "C1+",
            Regime::C1Minus => "C1-",
            Regime::C2Plus => "C2+",
            Regime::C2Minus => "C2-",
            Regime::O1a => "O1a",
            Regime::O1b => "O1b",
            Regime::O2 => "O2",
        }
    }

    pub fn from_name(s: &str) -> Option<Regime> {
        let s = s.trim();
        let norm = s
            .replace("plus", "+")
            .replace("minus", "-")
            .replace("Plus", "+")
            .replace("Minus", "-");
        Regime::ALL.into_iter().find(|r| r.name().eq_ignore_ascii_case(&norm))
    }

    /// The representative `(w, ψ)` point used for this regime in the figures.
    pub fn labelled_point(&self) -> (f64, f64) {
        match self {
            Regime::U1 => (0.01, 0.01),
            Regime::U2a => (1.0 / 1.01, 0.1),
            Regime::U2b => (1.0 / 1.1, 0.01),
            Regime::C1Plus => (0.1, 1.1),
            Regime::C1Minus => (0.1, 0.9),
            Regime::C2Plus => (1.0 / 1.1, 1.1),
            Regime::C2Minus => (1.0 / 1.1, 0.9),
            Regime::O1a => (0.01, 10.0),
            Regime::O1b => (0.1, 100.0),
            Regime::O2 => (1.0 / 1.1, 10.0),
        }
    }

    /// Interaction half-duration `t₀` (in units of `1/ω_S`) used with the
    /// labelled point.
    pub fn labelled_t0(&self) -> f64 {
        match self {
            Regime::U1 => 0.3,
            Regime::U2a | Regime::U2b => 10.0,
            Regime::C1Plus | Regime::C1Minus | Regime::C2Plus | Regime::C2Minus => 5.0,
            Regime::O1a | Regime::O1b => 0.2,
            Regime::O2 => 2.0,
        }
    }

    pub fn is_supercritical(&self) -> bool {
        matches!(
            self,
            Regime::C1Plus | Regime::C2Plus | Regime::O1a | Regime::O1b | Regime::O2
        )
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Boundaries of the phase diagram. The physics only gives `≪`/`≫`
/// orderings, so these are conventions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeThresholds {
    /// `ψ` below this is under-critical.
    pub psi_under: f64,
    /// `ψ` above this is over-critical.
    pub psi_over: f64,
    /// `w` below this selects the "1" sub-family.
    pub w_small: f64,
    /// `g_p` below this counts as perturbative.
    pub gp_perturbative: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        RegimeThresholds {
            psi_under: 0.5,
            psi_over: 2.0,
            w_small: 0.3,
            gp_perturbative: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeLabel {
    pub regime: Regime,
    pub perturbative: bool,
    /// Secular time in units of `1/ω_S`.
    pub secular_time: Option<f64>,
}

/// `g_p` in terms of `w` and `ψ`.
pub fn perturbativity_gp_wpsi(w: f64, psi: f64) -> f64 {
    psi * (w / (2.0 * (1.0 + w * w))).sqrt()
}

pub fn classify_regime(w: f64, psi: f64, thr: &RegimeThresholds) -> Result<RegimeLabel, ModelError> {
    if !(w > 0.0 && w <= 1.0) {
        return Err(ModelError::InvalidParams(format!(
            "w = {w} outside (0, 1]; swap system and environment"
        )));
    }
    if !(psi > 0.0 && psi.is_finite()) {
        return Err(ModelError::InvalidParams(format!("psi = {psi} must be positive")));
    }
    let small_w = w < thr.w_small;
    let regime = if psi < thr.psi_under {
        if small_w {
            Regime::U1
        } else if 1.0 / w - 1.0 < psi {
            Regime::U2a
        } else {
            Regime::U2b
        }
    } else if psi <= thr.psi_over {
        match (small_w, psi > 1.0) {
            (true, true) => Regime::C1Plus,
            (true, false) => Regime::C1Minus,
            (false, true) => Regime::C2Plus,
            (false, false) => Regime::C2Minus,
        }
    } else if small_w {
        if w < 1.0 / psi {
            Regime::O1a
        } else {
            Regime::O1b
        }
    } else {
        Regime::O2
    };
    Ok(RegimeLabel {
        regime,
        perturbative: perturbativity_gp_wpsi(w, psi) < thr.gp_perturbative,
        secular_time: secular_time(regime, 1.0, w, psi),
    })
}

/// Time after which the lowest-order expansion of `regime` dephases.
pub fn secular_time(regime: Regime, omega_s: f64, w: f64, psi: f64) -> Option<f64> {
    let dw = 1.0 / w - 1.0;
    match regime {
        Regime::U1 => Some(1.0 / (omega_s * psi * psi)),
        Regime::U2a => Some(1.0 / (omega_s * psi)),
        Regime::U2b => Some(dw / (omega_s * psi * psi)),
        Regime::C1Plus | Regime::C1Minus => {
            let dpsi = (1.0 - psi).abs();
            Some((1.0 / w).min(1.0 / dpsi.sqrt()) / omega_s)
        }
        _ => None,
    }
}
