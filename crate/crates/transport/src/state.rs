use cho_model::{coupling_xi, ScenarioParams};
use cho_symplectic::{
    compound2, derivation2, purity_from_det, GaussianDiagnostics, Mat2, Mat4, Mat6, Sym4, SymplecticError, DET_CLAMP,
    PAIR_E, PAIR_S,
};

/// Length of the integrated state: σ's upper triangle followed by that of
/// its second compound.
pub(crate) const PACKED: usize = 31;

/// Joint covariance matrix at time `t`.
///
/// `det_s` and `det_e` are the single-mode determinants. When the state comes
/// from the integrator they are evolved directly (as entries of `Λ²σ`) and
/// stay accurate even when σ is squeezed so strongly that recomputing them
/// from σ's entries would cancel catastrophically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceState {
    pub t: f64,
    pub sigma: Mat4,
    pub det_s: f64,
    pub det_e: f64,
}

impl CovarianceState {
    pub fn from_sigma(t: f64, sigma: Mat4) -> Self {
        CovarianceState {
            t,
            sigma,
            det_s: sigma.block(0, 0).det(),
            det_e: sigma.block(1, 1).det(),
        }
    }

    pub fn system_block(&self) -> Mat2 {
        self.sigma.block(0, 0)
    }

    pub fn env_block(&self) -> Mat2 {
        self.sigma.block(1, 1)
    }

    /// `σ_SE`, rows indexed by system quadratures.
    pub fn cross_block(&self) -> Mat2 {
        self.sigma.block(0, 1)
    }

    pub fn purity_s(&self) -> Result<f64, SymplecticError> {
        purity_from_det(self.det_s)
    }

    pub fn purity_e(&self) -> Result<f64, SymplecticError> {
        purity_from_det(self.det_e)
    }

    /// Validity diagnostics; the symplectic eigenvalues use the tracked
    /// determinants, the global determinant is recomputed from σ.
    pub fn diagnostics(&self) -> GaussianDiagnostics {
        let nu_s = self.det_s.max(0.0).sqrt();
        let nu_e = self.det_e.max(0.0).sqrt();
        GaussianDiagnostics {
            det: self.sigma.det(),
            nu_s,
            nu_e,
            valid: nu_s >= 1.0 - DET_CLAMP && nu_e >= 1.0 - DET_CLAMP,
        }
    }

    pub(crate) fn packed(&self) -> [f64; PACKED] {
        let mut y = [0.0; PACKED];
        y[..10].copy_from_slice(&Sym4::from_mat4(&self.sigma).0);
        pack6(&compound2(&self.sigma), &mut y[10..]);
        y
    }

    pub(crate) fn unpack(t: f64, y: &[f64; PACKED]) -> Self {
        let mut s = [0.0; 10];
        s.copy_from_slice(&y[..10]);
        CovarianceState {
            t,
            sigma: Sym4(s).to_mat4(),
            det_s: y[10 + sym6_index(PAIR_S, PAIR_S)],
            det_e: y[10 + sym6_index(PAIR_E, PAIR_E)],
        }
    }
}

/// Index of `(i, j)`, `i ≤ j`, in the row-wise upper triangle of a 6×6.
const fn sym6_index(i: usize, j: usize) -> usize {
    i * 6 - i * (i + 1) / 2 + j
}

fn pack6(m: &Mat6, out: &mut [f64]) {
    let mut k = 0;
    for i in 0..6 {
        for j in i..6 {
            out[k] = 0.5 * (m[i][j] + m[j][i]);
            k += 1;
        }
    }
}

pub fn vacuum_initial(p: &ScenarioParams) -> CovarianceState {
    let sigma = Mat4::diag([1.0 / p.omega_s, p.omega_s, 1.0 / p.omega_e, p.omega_e]);
    CovarianceState {
        t: p.t_in(),
        sigma,
        det_s: 1.0,
        det_e: 1.0,
    }
}

/// Generator `K = Ω𝓗` for a given instantaneous coupling.
pub fn generator(xi: f64, p: &ScenarioParams) -> Mat4 {
    let (s2, e2) = (p.omega_s * p.omega_s, p.omega_e * p.omega_e);
    Mat4([
        [0.0, 1.0, 0.0, 0.0],
        [-s2, 0.0, -xi, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [-xi, 0.0, -e2, 0.0],
    ])
}

/// `dσ/dt = Ω𝓗σ − σ𝓗Ω` for an explicit coupling value.
pub fn transport_rhs_xi(xi: f64, sigma: &Mat4, p: &ScenarioParams) -> Mat4 {
    let m = generator(xi, p) * *sigma;
    m + m.transpose()
}

pub fn transport_rhs(state: &CovarianceState, p: &ScenarioParams) -> Mat4 {
    transport_rhs_xi(coupling_xi(state.t, p), &state.sigma, p)
}

/// Same right-hand side on the packed state, σ and `Λ²σ` together. The σ
/// part is written out by hand: this is the inner loop of every integration.
pub(crate) fn packed_rhs(xi: f64, s2: f64, e2: f64, y: &[f64; PACKED]) -> [f64; PACKED] {
    let mut out = [0.0; PACKED];
    let sig: &[f64; 10] = y[..10].try_into().unwrap();
    out[..10].copy_from_slice(&sigma_rhs(xi, s2, e2, sig));

    // Λ²σ̇ = D Λ²σ + Λ²σ Dᵀ with D the derivation induced by K
    let k = Mat4([
        [0.0, 1.0, 0.0, 0.0],
        [-s2, 0.0, -xi, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [-xi, 0.0, -e2, 0.0],
    ]);
    let d = derivation2(&k);
    let mut p = [[0.0; 6]; 6];
    let mut idx = 10;
    for i in 0..6 {
        for j in i..6 {
            p[i][j] = y[idx];
            p[j][i] = y[idx];
            idx += 1;
        }
    }
    let mut q = [[0.0; 6]; 6];
    for i in 0..6 {
        for m in 0..6 {
            let dim = d[i][m];
            if dim == 0.0 {
                continue;
            }
            for j in 0..6 {
                q[i][j] += dim * p[m][j];
            }
        }
    }
    let mut idx = 10;
    for i in 0..6 {
        for j in i..6 {
            out[idx] = q[i][j] + q[j][i];
            idx += 1;
        }
    }
    out
}

fn sigma_rhs(xi: f64, s2: f64, e2: f64, y: &[f64; 10]) -> [f64; 10] {
    // packed order: 00 01 02 03 11 12 13 22 23 33
    let [a00, a01, a02, a03, a11, a12, a13, a22, a23, a33] = *y;
    // rows of M = Kσ
    // row0 = σ row1, row1 = -s2 σ row0 - xi σ row2,
    // row2 = σ row3, row3 = -xi σ row0 - e2 σ row2
    let s = [
        [a00, a01, a02, a03],
        [a01, a11, a12, a13],
        [a02, a12, a22, a23],
        [a03, a13, a23, a33],
    ];
    let mut m = [[0.0; 4]; 4];
    for j in 0..4 {
        m[0][j] = s[1][j];
        m[1][j] = -s2 * s[0][j] - xi * s[2][j];
        m[2][j] = s[3][j];
        m[3][j] = -xi * s[0][j] - e2 * s[2][j];
    }
    [
        2.0 * m[0][0],
        m[0][1] + m[1][0],
        m[0][2] + m[2][0],
        m[0][3] + m[3][0],
        2.0 * m[1][1],
        m[1][2] + m[2][1],
        m[1][3] + m[3][1],
        2.0 * m[2][2],
        m[2][3] + m[3][2],
        2.0 * m[3][3],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use cho_symplectic::OMEGA4;

    fn params(psi: f64) -> ScenarioParams {
        ScenarioParams::smooth(1.0, 2.0, psi, 10.0, 1.0).unwrap()
    }

    #[test]
    fn vacuum_layout() {
        let p = params(0.9);
        let v = vacuum_initial(&p);
        assert_eq!(v.sigma, Mat4::diag([1.0, 1.0, 0.5, 2.0]));
        assert_eq!(v.t, -30.0);
        assert_eq!(v.purity_s().unwrap(), 1.0);
        assert_eq!(v.cross_block(), Mat2::ZERO);
        assert_eq!(v.system_block(), Mat2::diag(1.0, 1.0));
    }

    #[test]
    fn vacuum_is_stationary_when_free() {
        let p = params(0.0);
        let v = vacuum_initial(&p);
        assert_eq!(transport_rhs_xi(0.0, &v.sigma, &p), Mat4::ZERO);
    }

    #[test]
    fn squeezed_system_rotates_alone() {
        let p = params(0.0);
        let sigma = Mat4::diag([2.0, 0.5, 0.5, 2.0]);
        let d = transport_rhs_xi(0.0, &sigma, &p);
        // S block by hand: ω_S = 1, σ_S = diag(2, ½) → [[0, ½−2], [½−2, 0]]
        assert_eq!(d.block(0, 0), Mat2::sym(0.0, -1.5, 0.0));
        assert_eq!(d.block(1, 1), Mat2::ZERO);
        assert_eq!(d.block(0, 1), Mat2::ZERO);
    }

    #[test]
    fn matches_commutator_form() {
        let p = params(0.7);
        let sigma = Mat4([
            [1.2, 0.1, 0.3, -0.2],
            [0.1, 0.9, 0.05, 0.4],
            [0.3, 0.05, 0.6, 0.0],
            [-0.2, 0.4, 0.0, 2.1],
        ]);
        let h = cho_model::hamiltonian(1.3, &p);
        let expect = OMEGA4 * h * sigma - sigma * h * OMEGA4;
        let got = transport_rhs_xi(1.3, &sigma, &p);
        assert!(got.max_abs_diff(&expect) < 1e-14);
        assert!(got.is_symmetric(0.0));
        let packed = sigma_rhs(1.3, 1.0, 4.0, &Sym4::from_mat4(&sigma).0);
        assert!(Sym4(packed).to_mat4().max_abs_diff(&expect) < 1e-14);
    }

    #[test]
    fn compound_part_tracks_minors() {
        // d/dt Λ²σ by finite differences of the minors along σ̇
        let sigma = Mat4([
            [1.2, 0.1, 0.3, -0.2],
            [0.1, 0.9, 0.05, 0.4],
            [0.3, 0.05, 0.6, 0.0],
            [-0.2, 0.4, 0.0, 2.1],
        ]);
        let st = CovarianceState::from_sigma(0.0, sigma);
        let y = st.packed();
        let dy = packed_rhs(1.3, 1.0, 4.0, &y);
        let dsig = Sym4(dy[..10].try_into().unwrap()).to_mat4();
        let h = 1e-6;
        let plus = compound2(&(sigma + dsig.scale(h)));
        let minus = compound2(&(sigma - dsig.scale(h)));
        let mut idx = 10;
        for i in 0..6 {
            for j in i..6 {
                let fd = (plus[i][j] - minus[i][j]) / (2.0 * h);
                assert!((fd - dy[idx]).abs() < 1e-8, "({i},{j}): {fd} vs {}", dy[idx]);
                idx += 1;
            }
        }
        let back = CovarianceState::unpack(0.0, &y);
        assert!((back.det_s - sigma.block(0, 0).det()).abs() < 1e-15);
        assert!((back.det_e - sigma.block(1, 1).det()).abs() < 1e-15);
    }

    #[test]
    fn determinant_is_conserved_to_first_order() {
        // d det σ/dt = det σ · Tr(σ⁻¹ σ̇) = 2 det σ · Tr K = 0
        let p = params(0.7);
        let sigma = Mat4([
            [1.2, 0.1, 0.3, -0.2],
            [0.1, 0.9, 0.05, 0.4],
            [0.3, 0.05, 0.6, 0.0],
            [-0.2, 0.4, 0.0, 2.1],
        ]);
        let d = transport_rhs_xi(1.3, &sigma, &p);
        let tr = (sigma.inverse().unwrap() * d).trace();
        assert!(tr.abs() < 1e-13);
    }
}
