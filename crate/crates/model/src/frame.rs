use crate::{coupling_xi, coupling_xi_dot, ModelError, Profile, ScenarioParams};

/// Instantaneous normal-mode frame of the coupled pair.
///
/// `ω₁` is the soft mode; it turns imaginary above `ξ_c`, in which case
/// `omega1_abs = |ω₁|` and `delta_flag = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticFrame {
    pub xi: f64,
    pub theta: f64,
    pub theta_dot: f64,
    pub omega1_sq: f64,
    pub omega2_sq: f64,
    pub omega1_abs: f64,
    pub omega2: f64,
    pub delta_flag: u8,
    /// `ω̇₁/(2ω₁)`; real for either sign of `ω₁²`.
    pub beta1: f64,
    pub beta2: f64,
    /// `d|ω₁|/dt`.
    pub omega1_abs_dot: f64,
    pub omega2_dot: f64,
}

impl AdiabaticFrame {
    /// Frame for a given coupling and its rate of change.
    pub fn from_coupling(omega_s: f64, omega_e: f64, xi: f64, xi_dot: f64) -> Result<Self, ModelError> {
        let (s2, e2) = (omega_s * omega_s, omega_e * omega_e);
        let delta = e2 - s2;
        let r = delta.hypot(2.0 * xi);
        let omega2_sq = 0.5 * (s2 + e2 + r);
        // product form avoids the cancellation in ½(Σ − R)
        let omega1_sq = (s2 * e2 - xi * xi) / omega2_sq;
        if omega1_sq.abs() < 1e-12 * s2 {
            return Err(ModelError::CriticalPoint { xi });
        }
        // continuous in ξ ≥ 0; gives π/4 for degenerate frequencies
        let theta = 0.5 * (2.0 * xi).atan2(delta);
        let theta_dot = if r > 0.0 { delta * xi_dot / (r * r) } else { 0.0 };

        let omega2 = omega2_sq.sqrt();
        let omega1_abs = omega1_sq.abs().sqrt();
        let xx = if r > 0.0 { xi * xi_dot / r } else { 0.0 };
        let omega2_dot = xx / omega2;
        let (omega1_abs_dot, delta_flag) = if omega1_sq > 0.0 {
            (-xx / omega1_abs, 0)
        } else {
            (xx / omega1_abs, 1)
        };
        Ok(AdiabaticFrame {
            xi,
            theta,
            theta_dot,
            omega1_sq,
            omega2_sq,
            omega1_abs,
            omega2,
            delta_flag,
            beta1: -0.5 * xx / omega1_sq,
            beta2: 0.5 * xx / omega2_sq,
            omega1_abs_dot,
            omega2_dot,
        })
    }

    pub fn is_supercritical(&self) -> bool {
        self.delta_flag == 1
    }
}

/// Frame at time `t`. For the top-hat profile the derivative terms are zero
/// (the frame is piecewise constant).
pub fn adiabatic_frame(t: f64, p: &ScenarioParams) -> Result<AdiabaticFrame, ModelError> {
    let xi = coupling_xi(t, p);
    let xi_dot = match p.profile {
        Profile::Smooth => coupling_xi_dot(t, p)?,
        Profile::IsosoTopHat => 0.0,
    };
    AdiabaticFrame::from_coupling(p.omega_s, p.omega_e, xi, xi_dot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Coupling;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn frame(ws: f64, we: f64, xi: f64) -> AdiabaticFrame {
        AdiabaticFrame::from_coupling(ws, we, xi, 0.0).unwrap()
    }

    #[test]
    fn decoupled() {
        let f = frame(1.0, 2.0, 0.0);
        assert_eq!(f.theta, 0.0);
        assert_eq!(f.omega1_abs, 1.0);
        assert_eq!(f.omega2, 2.0);
        assert_eq!(f.delta_flag, 0);
    }

    #[test]
    fn eighth_turn() {
        let f = frame(1.0, 2.0, 1.5);
        assert!((f.theta - PI / 8.0).abs() < 1e-15);
    }

    #[test]
    fn critical_point_rejected() {
        let e = AdiabaticFrame::from_coupling(1.0, 2.0, 2.0, 0.0);
        assert_eq!(e, Err(ModelError::CriticalPoint { xi: 2.0 }));
    }

    #[test]
    fn supercritical_example() {
        let f = frame(1.0, 2.0, 2.2);
        // independent: ½(Σ − √(Δ² + 4ξ²))
        let w1sq = 0.5 * (5.0 - (9.0f64 + 4.0 * 2.2 * 2.2).sqrt());
        assert!((f.omega1_sq - w1sq).abs() < 1e-14);
        assert!((f.omega1_sq + 0.16270).abs() < 1e-5);
        assert!((f.omega1_abs - 0.40336).abs() < 1e-5);
        assert_eq!(f.delta_flag, 1);
    }

    #[test]
    fn equal_frequencies() {
        let f = frame(1.0, 1.0, 0.3);
        assert!((f.theta - PI / 4.0).abs() < 1e-15);
        assert!((f.omega2_sq - 1.3).abs() < 1e-15);
        assert!((f.omega1_sq - 0.7).abs() < 1e-15);
        assert_eq!(
            AdiabaticFrame::from_coupling(1.0, 1.0, 0.0, 1.0).unwrap().theta_dot,
            0.0
        );
    }

    #[test]
    fn top_hat_frame_is_static() {
        let p = ScenarioParams::isoso(1.0, 2.0, 0.9, 10.0).unwrap();
        let f = adiabatic_frame(0.0, &p).unwrap();
        assert_eq!((f.theta_dot, f.beta1, f.beta2), (0.0, 0.0, 0.0));
        assert_eq!(f.xi, 1.8);
    }

    fn smooth(ws: f64, we: f64, psi: f64, t0: f64, tau: f64) -> ScenarioParams {
        ScenarioParams::new(ws, we, Coupling::Psi(psi), t0, tau, Profile::Smooth).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn frame_consistency(ws in 0.1f64..10.0, we in 0.1f64..10.0, psi in 0.0f64..5.0, t in -20.0f64..20.0) {
            let p = smooth(ws, we, psi, 2.0, 1.5);
            let f = match adiabatic_frame(t, &p) {
                Ok(f) => f,
                Err(_) => return Ok(()),
            };
            let (s2, e2) = (ws * ws, we * we);
            let prod = s2 * e2 - f.xi * f.xi;
            prop_assert!((f.omega1_sq * f.omega2_sq - prod).abs() <= 1e-10 * (s2 * e2));
            prop_assert!(rel(f.omega1_sq + f.omega2_sq, s2 + e2) < 1e-10);
            prop_assert!(f.omega2_sq > 0.0);
            prop_assert_eq!(f.omega1_sq <= 0.0, f.xi >= ws * we);
            prop_assert!((0.0..=PI / 2.0).contains(&f.theta));
        }
    }

    proptest! {
        #[test]
        fn rates_match_finite_difference(psi in 0.05f64..3.0, t in -6.0f64..6.0, tau in 0.5f64..4.0) {
            let p = smooth(1.0, 2.0, psi, 2.0, tau);
            let h = 1e-5 * tau;
            let (Ok(f), Ok(a), Ok(b)) = (
                adiabatic_frame(t, &p),
                adiabatic_frame(t + h, &p),
                adiabatic_frame(t - h, &p),
            ) else {
                return Ok(());
            };
            // stay clear of the critical point where ω̇₁ diverges
            prop_assume!(f.omega1_sq.abs() > 1e-2);
            let tol = |x: f64| 1e-5 * x.abs() + 1e-9;
            let fd_theta = (a.theta - b.theta) / (2.0 * h);
            prop_assert!((fd_theta - f.theta_dot).abs() <= tol(f.theta_dot), "{} vs {}", fd_theta, f.theta_dot);
            let fd_w2 = (a.omega2 - b.omega2) / (2.0 * h);
            prop_assert!((fd_w2 - f.omega2_dot).abs() <= tol(f.omega2_dot));
            let fd_w1 = (a.omega1_abs - b.omega1_abs) / (2.0 * h);
            prop_assert!((fd_w1 - f.omega1_abs_dot).abs() <= tol(f.omega1_abs_dot) + 1e-7);
            // ω₁ = i^δ|ω₁| makes β₁ = (d|ω₁|/dt)/(2|ω₁|) on both sides of ξ_c
            prop_assert!((f.beta1 - f.omega1_abs_dot / (2.0 * f.omega1_abs)).abs() <= 1e-12 * (1.0 + f.beta1.abs()));
        }
    }
}
