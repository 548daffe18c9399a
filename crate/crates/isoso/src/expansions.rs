use num_complex::Complex64 as C64;

use cho_model::{classify_regime, AdiabaticFrame, Regime, RegimeThresholds, ScenarioParams};

use crate::IsosoError;

/// The eight asymptotic formulas. The C formulas serve both signs of
/// `δψ = 1 − ψ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExpansionFormula {
    U1,
    U2a,
    U2b,
    C1,
    C2,
    O1a,
    O1b,
    O2,
}

/// An expansion formula tied to the regime label it was derived for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExpansionCase {
    pub regime: Regime,
    pub formula: ExpansionFormula,
    pub validity: &'static str,
}

#[allow(non_upper_case_globals)]
impl ExpansionCase {
    pub const U1: ExpansionCase = ExpansionCase::of(Regime::U1);
    pub const U2a: ExpansionCase = ExpansionCase::of(Regime::U2a);
    pub const U2b: ExpansionCase = ExpansionCase::of(Regime::U2b);
    pub const O1a: ExpansionCase = ExpansionCase::of(Regime::O1a);
    pub const O1b: ExpansionCase = ExpansionCase::of(Regime::O1b);
    pub const O2: ExpansionCase = ExpansionCase::of(Regime::O2);

    pub const fn of(regime: Regime) -> ExpansionCase {
        use ExpansionFormula as F;
        let (formula, validity) = match regime {
            Regime::U1 => (F::U1, "w ≪ 1, ψ ≪ 1"),
            Regime::U2a => (F::U2a, "δw ≪ ψ ≪ 1"),
            Regime::U2b => (F::U2b, "ψ ≪ δw ≪ 1"),
            Regime::C1Plus | Regime::C1Minus => (F::C1, "w ≪ 1, |δψ| ≪ 1"),
            Regime::C2Plus | Regime::C2Minus => (F::C2, "δw ≪ 1, |δψ| ≪ 1"),
            Regime::O1a => (F::O1a, "w ≪ 1/ψ ≪ 1"),
            Regime::O1b => (F::O1b, "1/ψ ≪ w ≪ 1"),
            Regime::O2 => (F::O2, "δw ≪ 1, 1/ψ ≪ 1"),
        };
        ExpansionCase {
            regime,
            formula,
            validity,
        }
    }

    pub fn name(&self) -> &'static str {
        self.regime.name()
    }

    pub fn from_name(s: &str) -> Option<ExpansionCase> {
        Regime::from_name(s).map(ExpansionCase::of)
    }
}

/// Flags a formula evaluated in a corner of parameter space it was not
/// derived for (the classifier disagrees on the family). Advisory only:
/// [`regime_purity`] evaluates regardless.
pub fn check_case_domain(case: ExpansionCase, p: &ScenarioParams) -> Result<(), IsosoError> {
    let (w, psi) = (p.w(), p.psi());
    let bad = |reason: String| {
        Err(IsosoError::InvalidCase {
            case: case.name(),
            reason,
        })
    };
    if w > 1.0 {
        return bad(format!("w = {w} > 1; swap system and environment"));
    }
    let label = classify_regime(w, psi, &RegimeThresholds::default())?;
    if ExpansionCase::of(label.regime).formula != case.formula {
        return bad(format!("(w, ψ) = ({w}, {psi}) classifies as {}", label.regime));
    }
    Ok(())
}

/// Expanded purity a time `dt = t + t₀` after switch-on. The normal
/// frequencies are the exact plateau values, not their expansions.
pub fn regime_purity(case: ExpansionCase, dt: f64, p: &ScenarioParams) -> Result<f64, IsosoError> {
    p.validate()?;
    let fr = AdiabaticFrame::from_coupling(p.omega_s, p.omega_e, p.xi0, 0.0)?;
    let (w, psi) = (p.w(), p.psi());
    let (a1, w2) = (fr.omega1_abs, fr.omega2);
    let d_psi = 1.0 - psi;

    // Near criticality the formulas are written with circular functions of
    // ω₁ divided by powers of √δψ; both continue analytically to δψ < 0
    // (ω₁ = i|ω₁|), where they turn hyperbolic.
    let w1 = if fr.is_supercritical() {
        C64::new(0.0, a1)
    } else {
        C64::new(a1, 0.0)
    };
    let sqrt_dpsi = C64::new(d_psi, 0.0).sqrt();
    let sin_over = |k: f64| ((w1 * k * dt).sin() / sqrt_dpsi).re;
    let cos1 = |k: f64| (w1 * k * dt).cos().re;

    let ch = |k: f64| (k * a1 * dt).cosh();
    let sh = |k: f64| (k * a1 * dt).sinh();
    let c2 = |k: f64| (k * w2 * dt).cos();
    let s2 = |k: f64| (k * w2 * dt).sin();
    let inv_sqrt = |x: f64| x.powf(-0.5);

    use ExpansionFormula as F;
    Ok(match case.formula {
        F::U1 => 1.0 - 2.0 * w * psi * psi * (0.5 * (a1 + w2) * dt).sin().powi(2),
        F::U2a => {
            1.0 - psi * psi / 16.0 * (3.0 - 2.0 * (2.0 * a1 * dt).cos() - 2.0 * c2(2.0) + (2.0 * (w2 - a1) * dt).cos())
        }
        F::U2b => 1.0 - 0.5 * psi * psi * (0.5 * (a1 + w2) * dt).sin().powi(2),
        F::C1 => {
            let s = sin_over(1.0);
            inv_sqrt(
                1.0 + 0.5 * w * s * s
                    + 2f64.sqrt() * w * s * s2(1.0)
                    + w / 8.0 * (9.0 + 7.0 * cos1(2.0) - 16.0 * cos1(1.0) * c2(1.0)),
            )
        }
        F::C2 => {
            let s = sin_over(1.0);
            inv_sqrt(
                s * s / 8.0 * (3.0 - c2(2.0))
                    + sin_over(2.0) / (8.0 * 2f64.sqrt()) * s2(2.0)
                    + (23.0 + cos1(2.0) * (11.0 - 3.0 * c2(2.0)) + c2(2.0)) / 32.0,
            )
        }
        F::O1a => inv_sqrt(1.0 + w * psi * psi * (0.5 * ch(2.0) - 2.0 * ch(1.0) * c2(1.0) + 1.5)),
        F::O1b => {
            let (ch2, sh2, sh1) = (ch(2.0), sh(2.0), sh(1.0));
            inv_sqrt(
                psi / 8.0 * (ch2 + sh2 * s2(2.0) - c2(2.0))
                    + (ch2 - 2.0 * ch2 * c2(2.0) + c2(2.0)) / (16.0 * w)
                    + (5.0 + c2(2.0) + 2.0 * ch2 * c2(1.0).powi(2)) / 8.0
                    + (3.0 * c2(2.0) - 3.0 * ch2 + 32.0 * sh1 * s2(1.0) - 13.0 * sh2 * s2(2.0)) / (128.0 * psi * w * w),
            )
        }
        F::O2 => {
            let (ch2, sh2) = (ch(2.0), sh(2.0));
            inv_sqrt(psi / 8.0 * (ch2 + sh2 * s2(2.0) - c2(2.0)) + (5.0 + 2.0 * c2(2.0) + ch2 * (2.0 - c2(2.0))) / 8.0)
        }
    })
}
