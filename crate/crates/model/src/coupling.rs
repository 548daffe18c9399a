use cho_symplectic::Mat4;

use crate::{ModelError, Profile, ScenarioParams};

/// `ln cosh x` without overflow.
pub fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// Coupling strength `ξ(t)`.
///
/// The smooth profile `ξ₀·cosh²(t₀/τ)/[cosh((t₀+t)/τ)·cosh((t₀−t)/τ)]` is the
/// product-of-tanh form rewritten so that it never overflows. Summing the two
/// `ln cosh` terms makes the result bit-for-bit even in `t`, and `ξ(0) = ξ₀`
/// exactly.
pub fn coupling_xi(t: f64, p: &ScenarioParams) -> f64 {
    match p.profile {
        Profile::Smooth => {
            let lc0 = ln_cosh(p.t0 / p.tau);
            let u = ln_cosh((p.t0 + t) / p.tau) + ln_cosh((p.t0 - t) / p.tau);
            p.xi0 * ((lc0 + lc0) - u).exp()
        }
        Profile::IsosoTopHat => {
            if -p.t0 < t && t < p.t0 {
                p.xi0
            } else {
                0.0
            }
        }
    }
}

pub fn coupling_xi_dot(t: f64, p: &ScenarioParams) -> Result<f64, ModelError> {
    match p.profile {
        Profile::Smooth => {
            let xi = coupling_xi(t, p);
            let d = ((p.t0 + t) / p.tau).tanh() - ((p.t0 - t) / p.tau).tanh();
            Ok(-xi / p.tau * d)
        }
        Profile::IsosoTopHat => Err(ModelError::DerivativeUndefined),
    }
}

/// Dimensionless perturbative coupling `λ(t) = ξ(t)/√(ω_S ω_E)`.
pub fn lambda(t: f64, p: &ScenarioParams) -> f64 {
    coupling_xi(t, p) / (p.omega_s * p.omega_e).sqrt()
}

/// Quadratic-form matrix of the Hamiltonian, `H = ½ Rᵀ 𝓗 R`.
pub fn hamiltonian(xi: f64, p: &ScenarioParams) -> Mat4 {
    Mat4([
        [p.omega_s * p.omega_s, 0.0, xi, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [xi, 0.0, p.omega_e * p.omega_e, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn smooth(t0: f64, tau: f64) -> ScenarioParams {
        ScenarioParams::new(1.0, 2.0, crate::Coupling::Xi0(1.0), t0, tau, Profile::Smooth).unwrap()
    }

    /// Direct product-of-tanh form; fine for moderate arguments.
    fn xi_tanh(t: f64, p: &ScenarioParams) -> f64 {
        let a = ((p.t0 + t) / p.tau).tanh();
        let b = ((p.t0 - t) / p.tau).tanh();
        let c = (p.t0 / p.tau).tanh();
        p.xi0 * (1.0 + a * b) / (1.0 + c * c)
    }

    #[test]
    fn peak_and_tails() {
        let p = smooth(10.0, 1.0);
        assert_eq!(coupling_xi(0.0, &p), 1.0);
        assert!(coupling_xi(1e4, &p) < 1e-300);
        assert!(coupling_xi(-1e4, &p).is_finite());
    }

    #[test]
    fn value_at_plateau_edge() {
        let p = smooth(10.0, 1.0);
        let expect = 1.0 / (1.0 + 10f64.tanh().powi(2));
        assert!((coupling_xi(10.0, &p) - expect).abs() < 1e-14);
    }

    #[test]
    fn matches_tanh_form() {
        let p = smooth(3.0, 1.7);
        for k in -40..=40 {
            let t = 0.25 * k as f64;
            let (a, b) = (coupling_xi(t, &p), xi_tanh(t, &p));
            assert!((a - b).abs() < 1e-14, "t={t}: {a} vs {b}");
        }
    }

    #[test]
    fn derivative_examples() {
        let p = smooth(10.0, 1.0);
        assert_eq!(coupling_xi_dot(0.0, &p).unwrap(), 0.0);
        assert!(coupling_xi_dot(500.0, &p).unwrap().abs() < 1e-200);
        let t = 5.0;
        // ξ̇ is ~1e-4 here, so a smaller step drowns in round-off
        let h = 1e-5;
        let fd = (coupling_xi(t + h, &p) - coupling_xi(t - h, &p)) / (2.0 * h);
        let an = coupling_xi_dot(t, &p).unwrap();
        assert!((fd - an).abs() <= 1e-6 * an.abs().max(1e-12), "{fd} vs {an}");
    }

    #[test]
    fn top_hat() {
        let p = ScenarioParams::isoso(1.0, 2.0, 0.9, 10.0).unwrap();
        assert_eq!(coupling_xi(0.0, &p), 1.8);
        assert_eq!(coupling_xi(-10.0, &p), 0.0);
        assert_eq!(coupling_xi(10.0, &p), 0.0);
        assert_eq!(coupling_xi(9.999, &p), 1.8);
        assert_eq!(coupling_xi_dot(0.0, &p), Err(ModelError::DerivativeUndefined));
    }

    #[test]
    fn hamiltonian_layout() {
        let p = smooth(1.0, 1.0);
        let h = hamiltonian(0.3, &p);
        assert_eq!(h.transpose(), h);
        assert_eq!(h.0[0][2], 0.3);
        assert_eq!(h.0[2][2], 4.0);
    }

    proptest! {
        #[test]
        fn exactly_even(t in -200.0f64..200.0, t0 in 0.01f64..50.0, tau in 1e-4f64..50.0) {
            let p = smooth(t0, tau);
            prop_assert_eq!(coupling_xi(t, &p), coupling_xi(-t, &p));
        }

        #[test]
        fn derivative_matches_finite_difference(t in -30.0f64..30.0, t0 in 0.5f64..10.0, tau in 0.5f64..20.0) {
            let p = smooth(t0, tau);
            let h = 1e-6 * tau;
            let fd = (coupling_xi(t + h, &p) - coupling_xi(t - h, &p)) / (2.0 * h);
            let an = coupling_xi_dot(t, &p).unwrap();
            // round-off floor: ξ carries an absolute error of a few ulps of the
            // ln cosh arguments, amplified by 1/h in the difference quotient
            let floor = 64.0 * f64::EPSILON * (1.0 + (2.0 * t0 + t.abs()) / tau) / h;
            prop_assert!((fd - an).abs() <= 1e-6 * an.abs() + floor, "{} vs {}", fd, an);
        }
    }
}
