use cho_model::ScenarioParams;
use cho_transport::quad;

use crate::phases::{accumulate_phases, phase_grid, require_smooth_subcritical, subcritical_frame, AdiabaticConfig};
use crate::AdiabaticError;

/// Leading-order adiabatic purity `{1 + (sin²2θ/4)(ω₂−ω₁)²/(ω₁ω₂)}^{−1/2}`.
pub fn purity_adiabatic_lo(t: f64, p: &ScenarioParams) -> Result<f64, AdiabaticError> {
    let f = subcritical_frame(t, p)?;
    Ok(lo_from(f.theta, f.omega1_abs, f.omega2))
}

fn lo_from(theta: f64, w1: f64, w2: f64) -> f64 {
    // 2 − ω₁/ω₂ − ω₂/ω₁ = −(ω₂−ω₁)²/(ω₁ω₂), written without cancellation
    let s = (2.0 * theta).sin();
    (1.0 + 0.25 * s * s * (w2 - w1).powi(2) / (w1 * w2)).powf(-0.5)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NloIntegrals {
    pub t: f64,
    pub i_omega1: f64,
    pub i_omega2: f64,
    pub i_theta: f64,
    /// Particle-creation contribution.
    pub itilde_omega: f64,
    /// Basis-rotation contribution.
    pub itilde_theta: f64,
    pub gamma_lo: f64,
    /// First non-adiabatic correction `δγ⁽¹⁾`.
    pub delta_gamma: f64,
}

impl NloIntegrals {
    pub fn gamma_nlo(&self) -> f64 {
        self.gamma_lo + self.delta_gamma
    }
}

/// NLO integrals at every (sorted) time in `times`.
///
/// Each `I(t) = ∫ f(t′) cos[Φ(t) − Φ(t′)]` is split as
/// `cos Φ(t)·∫f cos Φ′ + sin Φ(t)·∫f sin Φ′`, so one cumulative pass over a
/// phase-resolving grid serves the whole series.
pub fn nlo_series(
    p: &ScenarioParams,
    times: &[f64],
    cfg: &AdiabaticConfig,
) -> Result<Vec<NloIntegrals>, AdiabaticError> {
    require_smooth_subcritical(p)?;
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(AdiabaticError::InvalidInput("times must be sorted".into()));
    }
    let Some(&t_last) = times.last() else {
        return Ok(Vec::new());
    };
    let t_in = p.t_in();
    let t_end = t_last.max(t_in + 1e-9 * p.tau);
    let grid = phase_grid(p, t_end, times, cfg);
    let ph = accumulate_phases(p, &grid, cfg)?;

    let mut bad = None;
    let moments: Vec<[f64; 6]> = quad::cumulative(
        |s: f64| {
            let f = match subcritical_frame(s, p) {
                Ok(f) => f,
                Err(e) => {
                    bad.get_or_insert(e);
                    return [0.0; 6];
                }
            };
            let (w1, w2) = ph.at(s);
            let (a1, a2) = (2.0 * f.beta1, 2.0 * f.beta2);
            let r = (f.omega1_abs / f.omega2).sqrt();
            let g = f.theta_dot * (r + 1.0 / r);
            let (s1, c1) = (2.0 * w1).sin_cos();
            let (s2, c2) = (2.0 * w2).sin_cos();
            let (sa, ca) = (w1 + w2).sin_cos();
            [a1 * c1, a1 * s1, a2 * c2, a2 * s2, g * ca, g * sa]
        },
        &grid,
        &cfg.quad_options(),
    )?;
    if let Some(e) = bad {
        return Err(e);
    }

    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        if t <= t_in {
            out.push(NloIntegrals {
                t,
                i_omega1: 0.0,
                i_omega2: 0.0,
                i_theta: 0.0,
                itilde_omega: 0.0,
                itilde_theta: 0.0,
                gamma_lo: purity_adiabatic_lo(t, p)?,
                delta_gamma: 0.0,
            });
            continue;
        }
        let k = grid
            .binary_search_by(|x| x.total_cmp(&t))
            .expect("times are grid nodes");
        let m = moments[k];
        let (w1, w2) = (ph.w1[k], ph.w2[k]);
        let (s1, c1) = (2.0 * w1).sin_cos();
        let (s2, c2) = (2.0 * w2).sin_cos();
        let (sa, ca) = (w1 + w2).sin_cos();
        let i_omega1 = c1 * m[0] + s1 * m[1];
        let i_omega2 = c2 * m[2] + s2 * m[3];
        let i_theta = ca * m[4] + sa * m[5];

        let f = subcritical_frame(t, p)?;
        let (o1, o2) = (f.omega1_abs, f.omega2);
        let s2t = (2.0 * f.theta).sin();
        let itilde_omega = 0.25 * s2t * (o2 / o1 - o1 / o2) * (i_omega2 - i_omega1);
        let r = (o1 / o2).sqrt();
        let itilde_theta = (r + 1.0 / r) * i_theta;
        let g0 = lo_from(f.theta, o1, o2);
        out.push(NloIntegrals {
            t,
            i_omega1,
            i_omega2,
            i_theta,
            itilde_omega,
            itilde_theta,
            gamma_lo: g0,
            delta_gamma: 0.5 * s2t * g0.powi(3) * (itilde_omega - itilde_theta),
        });
    }
    Ok(out)
}

pub fn nlo_integrals(t: f64, p: &ScenarioParams, cfg: &AdiabaticConfig) -> Result<NloIntegrals, AdiabaticError> {
    Ok(nlo_series(p, &[t], cfg)?[0])
}

/// `δγ⁽¹⁾(t)`.
pub fn purity_nlo_correction(t: f64, p: &ScenarioParams) -> Result<f64, AdiabaticError> {
    Ok(nlo_integrals(t, p, &AdiabaticConfig::default())?.delta_gamma)
}

/// `(Ĩ_ω, Ĩ_θ)`.
pub fn nlo_contributions(t: f64, p: &ScenarioParams) -> Result<(f64, f64), AdiabaticError> {
    let r = nlo_integrals(t, p, &AdiabaticConfig::default())?;
    Ok((r.itilde_omega, r.itilde_theta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use cho_model::adiabatic_frame;

    fn fig8(tau: f64) -> ScenarioParams {
        ScenarioParams::smooth(1.0, 2.0, 0.9, 1.0, tau).unwrap()
    }

    #[test]
    fn decoupled_is_trivial() {
        let p = ScenarioParams::smooth(1.0, 2.0, 0.0, 1.0, 5.0).unwrap();
        assert_eq!(purity_adiabatic_lo(0.0, &p).unwrap(), 1.0);
        let r = nlo_integrals(0.5, &p, &AdiabaticConfig::default()).unwrap();
        assert_eq!((r.itilde_omega, r.itilde_theta, r.delta_gamma), (0.0, 0.0, 0.0));
    }

    #[test]
    fn lo_matches_determinant_of_adiabatic_block() {
        // σ_S⁽⁰⁾ = c²·diag(1/ω₁, ω₁) + s²·diag(1/ω₂, ω₂)
        let p = fig8(10.0);
        for t in [-3.0, 0.0, 1.7] {
            let f = adiabatic_frame(t, &p).unwrap();
            let (c, s) = (f.theta.cos(), f.theta.sin());
            let a = c * c / f.omega1_abs + s * s / f.omega2;
            let d = c * c * f.omega1_abs + s * s * f.omega2;
            let g = 1.0 / (a * d).sqrt();
            assert!((g - purity_adiabatic_lo(t, &p).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn lo_recoheres() {
        let p = fig8(10.0);
        assert!((purity_adiabatic_lo(1e3, &p).unwrap() - 1.0).abs() < 1e-12);
        assert!(purity_adiabatic_lo(0.0, &p).unwrap() < 0.99);
    }

    #[test]
    fn nlo_vanishes_at_start_and_late() {
        let p = fig8(10.0);
        let ts = [p.t_in(), 0.0, 400.0];
        let r = nlo_series(&p, &ts, &AdiabaticConfig::default()).unwrap();
        assert_eq!(r[0].delta_gamma, 0.0);
        assert!(r[1].delta_gamma.abs() > 1e-6);
        assert!(r[2].delta_gamma.abs() < 1e-8, "{}", r[2].delta_gamma);
    }

    #[test]
    fn stable_under_tighter_tolerance() {
        let p = fig8(10.0);
        let ts: Vec<f64> = (0..9).map(|k| -20.0 + 5.0 * k as f64).collect();
        let a = nlo_series(&p, &ts, &AdiabaticConfig::default()).unwrap();
        let cfg = AdiabaticConfig {
            rel_tol: 1e-11,
            abs_tol: 1e-13,
            ..Default::default()
        };
        let b = nlo_series(&p, &ts, &cfg).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x.delta_gamma - y.delta_gamma).abs() < 1e-8);
        }
    }

    #[test]
    fn top_hat_is_rejected() {
        let p = ScenarioParams::isoso(1.0, 2.0, 0.5, 1.0).unwrap();
        assert_eq!(
            nlo_integrals(0.0, &p, &AdiabaticConfig::default()),
            Err(AdiabaticError::NonSmoothProfile)
        );
    }
}
