use cho_model::{coupling_xi, ScenarioParams};
use cho_symplectic::Mat2;
use cho_transport::CovarianceState;

/// Noise matrix with its eigenvalues `λ₋ ≤ λ₊`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseMatrix {
    pub b: Mat2,
    pub lambda_minus: f64,
    pub lambda_plus: f64,
}

/// `B = −ξ [[0, σ_SE,11], [σ_SE,11, 2σ_SE,21]]` for an explicit coupling.
pub fn noise_b_xi(state: &CovarianceState, xi: f64) -> NoiseMatrix {
    let s = &state.sigma.0;
    // σ_SE,11 = ⟨x_S x_E⟩, σ_SE,21 = ⟨p_S x_E⟩ (symmetrized, ×2)
    let (c11, c21) = (s[0][2], s[1][2]);
    let b = Mat2::sym(0.0, -xi * c11, -2.0 * xi * c21);
    // λ± = ξ[−σ_SE,21 ± √(σ_SE,21² + σ_SE,11²)], the small root via the product
    let r = c21.hypot(c11);
    let (lambda_minus, lambda_plus) = if xi == 0.0 {
        (0.0, 0.0)
    } else {
        let big = xi * (-c21 - c21.signum() * r);
        let det = -xi * xi * c11 * c11;
        let small = if big != 0.0 { det / big } else { 0.0 };
        if big < 0.0 {
            (big, small)
        } else {
            (small, big)
        }
    };
    NoiseMatrix {
        b,
        lambda_minus,
        lambda_plus,
    }
}

pub fn noise_b(state: &CovarianceState, p: &ScenarioParams) -> NoiseMatrix {
    noise_b_xi(state, coupling_xi(state.t, p))
}

/// `𝓗_S = diag(ω_S², 1)`.
pub fn system_hamiltonian(p: &ScenarioParams) -> Mat2 {
    Mat2::diag(p.omega_s * p.omega_s, 1.0)
}

/// `Ω𝓗_Sσ_S − σ_S𝓗_SΩ + B`.
pub fn reduced_rhs(sigma_s: &Mat2, b: &Mat2, h_s: &Mat2) -> Mat2 {
    let m = Mat2::OMEGA * *h_s * *sigma_s;
    m + m.transpose() + *b
}

/// `γ̇ = −(γ/2) Tr(σ_S⁻¹ B)`, given `det σ_S` separately so that a tracked
/// determinant can be used.
pub fn gamma_dot(sigma_s: &Mat2, det_s: f64, b: &Mat2) -> f64 {
    let gamma = 1.0 / det_s.sqrt();
    -0.5 * gamma * (sigma_s.adjugate() * *b).trace() / det_s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MarkovSurrogate {
    /// Drop the negative eigenvalue: `B̃ = diag(0, λ₊)`.
    DropNegative,
    /// `B̃ = −(γ̇/γ)σ_S` while decohering, which cancels the Bures velocity;
    /// falls back to `Unitary` when the purity grows.
    BestDecohering,
    /// `B̃ = 0`.
    Unitary,
}

impl MarkovSurrogate {
    pub const ALL: [MarkovSurrogate; 3] = [
        MarkovSurrogate::DropNegative,
        MarkovSurrogate::BestDecohering,
        MarkovSurrogate::Unitary,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            MarkovSurrogate::DropNegative => "drop-negative",
            MarkovSurrogate::BestDecohering => "best-decohering",
            MarkovSurrogate::Unitary => "unitary",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BestMarkovian {
    Positive(Mat2),
    /// Recohering: every `B̃` cancelling the velocity is indefinite.
    Infeasible,
}

/// Maximal-determinant `B̃` with the same `Tr(σ_S⁻¹B̃)` as `B`.
pub fn best_markovian_b(sigma_s: &Mat2, det_s: f64, b: &Mat2) -> BestMarkovian {
    let gd = gamma_dot(sigma_s, det_s, b);
    if gd > 0.0 {
        return BestMarkovian::Infeasible;
    }
    // k = −γ̇/γ, written with the entrywise trace so that Tr σ_S⁻¹(B − B̃)
    // cancels in floating point too, however squeezed σ_S is
    let adj = sigma_s.adjugate();
    BestMarkovian::Positive(sigma_s.scale((adj * *b).trace() / (adj * *sigma_s).trace()))
}

/// Surrogate `B̃` and the surrogate actually applied (after fallback).
pub fn surrogate_b(kind: MarkovSurrogate, sigma_s: &Mat2, det_s: f64, noise: &NoiseMatrix) -> (Mat2, MarkovSurrogate) {
    match kind {
        MarkovSurrogate::DropNegative => (Mat2::diag(0.0, noise.lambda_plus), kind),
        MarkovSurrogate::Unitary => (Mat2::ZERO, kind),
        MarkovSurrogate::BestDecohering => match best_markovian_b(sigma_s, det_s, &noise.b) {
            BestMarkovian::Positive(m) => (m, kind),
            BestMarkovian::Infeasible => (Mat2::ZERO, MarkovSurrogate::Unitary),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use cho_symplectic::{eig_sym2, Mat4};
    use proptest::prelude::*;

    fn state_with_cross(c11: f64, c21: f64) -> CovarianceState {
        let mut s = Mat4::diag([2.0, 2.0, 2.0, 2.0]);
        s.0[0][2] = c11;
        s.0[2][0] = c11;
        s.0[1][2] = c21;
        s.0[2][1] = c21;
        CovarianceState::from_sigma(0.0, s)
    }

    #[test]
    fn zero_coupling_is_zero_noise() {
        let n = noise_b_xi(&state_with_cross(0.3, -0.2), 0.0);
        assert_eq!(n.b, Mat2::ZERO);
        assert_eq!((n.lambda_minus, n.lambda_plus), (0.0, 0.0));
    }

    #[test]
    fn gamma_dot_zero_noise() {
        let s = Mat2::sym(1.2, 0.1, 1.0);
        assert_eq!(gamma_dot(&s, s.det(), &Mat2::ZERO), 0.0);
        match best_markovian_b(&s, s.det(), &Mat2::ZERO) {
            BestMarkovian::Positive(m) => assert_eq!(m.max_abs_diff(&Mat2::ZERO), 0.0),
            BestMarkovian::Infeasible => panic!(),
        }
    }

    #[test]
    fn free_rotation_conserves_determinant() {
        let h = Mat2::diag(4.0, 1.0);
        let s = Mat2::sym(0.7, 0.2, 1.9);
        let d = reduced_rhs(&s, &Mat2::ZERO, &h);
        // d(det)/dt = det·Tr(σ⁻¹σ̇)
        assert!((s.adjugate() * d).trace().abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn eigenvalues_match_both_closed_forms(c11 in -3.0f64..3.0, c21 in -3.0f64..3.0, xi in 0.01f64..5.0) {
            let n = noise_b_xi(&state_with_cross(c11, c21), xi);
            let (lo, hi) = eig_sym2(&n.b);
            let r = c21.hypot(c11);
            let scale = xi * (c11.abs() + c21.abs() + 1.0);
            prop_assert!((n.lambda_minus - lo).abs() < 1e-12 * scale);
            prop_assert!((n.lambda_plus - hi).abs() < 1e-12 * scale);
            prop_assert!((n.lambda_minus - xi * (-c21 - r)).abs() < 1e-12 * scale);
            prop_assert!((n.lambda_plus - xi * (-c21 + r)).abs() < 1e-12 * scale);
            let det = -xi * xi * c11 * c11;
            prop_assert!((n.b.det() - det).abs() <= 1e-12 * det.abs().max(1e-300));
            prop_assert!((n.lambda_minus * n.lambda_plus - det).abs() <= 1e-12 * det.abs());
            if c11 != 0.0 {
                prop_assert!(n.b.det() < 0.0);
            }
        }

        #[test]
        fn surrogates_are_positive(c11 in -3.0f64..3.0, c21 in -3.0f64..3.0, xi in 0.01f64..5.0,
                                   a in 1.0f64..3.0, c in -0.5f64..0.5) {
            let st = state_with_cross(c11, c21);
            let n = noise_b_xi(&st, xi);
            let s = Mat2::sym(a, c, (1.0 + c * c) / a + 0.5);
            for kind in MarkovSurrogate::ALL {
                let (bt, _) = surrogate_b(kind, &s, s.det(), &n);
                prop_assert!(eig_sym2(&bt).0 >= -1e-12 * bt.frobenius().max(1.0));
            }
        }
    }

    #[test]
    fn best_decohering_matches_trace() {
        let s = Mat2::sym(1.5, 0.3, 1.2);
        // a decohering B: positive trace against σ⁻¹
        let b = Mat2::sym(0.2, -0.4, 0.3);
        assert!(gamma_dot(&s, s.det(), &b) < 0.0);
        let BestMarkovian::Positive(bt) = best_markovian_b(&s, s.det(), &b) else {
            panic!()
        };
        let tr = |m: &Mat2| (s.adjugate() * *m).trace();
        assert!((tr(&bt) - tr(&b)).abs() < 1e-14);
        assert!(eig_sym2(&bt).0 >= 0.0);
        assert_eq!(best_markovian_b(&s, s.det(), &(-b)), BestMarkovian::Infeasible);
    }
}
