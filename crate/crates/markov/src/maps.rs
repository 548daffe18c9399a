//! Gaussian maps `σ_S ↦ XσXᵀ + Y` of the reduced system.

use cho_model::{coupling_xi, Profile, ScenarioParams};
use cho_symplectic::{Mat2, Mat4, Sym4};
use cho_transport::ode::{Dopri5, OdeOptions};
use cho_transport::{integrate_at, transport_rhs_xi, vacuum_initial, CovarianceState, IntegratorConfig, TEndPolicy};

use crate::noise::{noise_b_xi, surrogate_b, system_hamiltonian, MarkovSurrogate};
use crate::MarkovError;

/// Map from `t_a` to `t_b`: `σ_S(t_b) = X σ_S(t_a) Xᵀ + Y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapPair {
    pub x: Mat2,
    pub y: Mat2,
    pub t_a: f64,
    pub t_b: f64,
}

impl MapPair {
    pub fn identity(t: f64) -> Self {
        MapPair {
            x: Mat2::IDENTITY,
            y: Mat2::ZERO,
            t_a: t,
            t_b: t,
        }
    }

    pub fn apply(&self, sigma_s: &Mat2) -> Mat2 {
        (self.x * *sigma_s * self.x.transpose() + self.y).symmetrize()
    }
}

/// Which noise matrix drives `Y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseSource {
    Exact,
    Surrogate(MarkovSurrogate),
}

/// `later ∘ earlier`: `X = X₂X₁`, `Y = X₂Y₁X₂ᵀ + Y₂`.
pub fn compose(later: &MapPair, earlier: &MapPair) -> Result<MapPair, MarkovError> {
    if (later.t_a - earlier.t_b).abs() > 1e-12 * later.t_a.abs().max(1.0) {
        return Err(MarkovError::InvalidInput(format!(
            "maps do not chain: {} ≠ {}",
            earlier.t_b, later.t_a
        )));
    }
    Ok(MapPair {
        x: later.x * earlier.x,
        y: (later.x * earlier.y * later.x.transpose() + later.y).symmetrize(),
        t_a: earlier.t_a,
        t_b: later.t_b,
    })
}

// state: σ (10, packed upper triangle), X (4, row-major), Y (3)
const N: usize = 17;

fn pack(sigma: &Mat4, x: &Mat2, y: &Mat2) -> [f64; N] {
    let mut out = [0.0; N];
    out[..10].copy_from_slice(&Sym4::from_mat4(sigma).0);
    out[10..14].copy_from_slice(&[x.a11(), x.a12(), x.a21(), x.a22()]);
    out[14..].copy_from_slice(&[y.a11(), y.a12(), y.a22()]);
    out
}

fn unpack(v: &[f64; N]) -> (Mat4, Mat2, Mat2) {
    (
        Sym4(v[..10].try_into().unwrap()).to_mat4(),
        Mat2::new(v[10], v[11], v[12], v[13]),
        Mat2::sym(v[14], v[15], v[16]),
    )
}

/// Co-integrate the full state with `(X, Y)` from `t_a` to `t_b`.
///
/// `Ẋ = Ω𝓗_S X` and `Ẏ = Ω𝓗_S Y − Y𝓗_S Ω + B`, where `B` (or its
/// surrogate) comes from the exact cross-correlations along the way. The
/// state at `t_a` is obtained by integrating from the vacuum.
pub fn map_pair_evolve(
    p: &ScenarioParams,
    t_a: f64,
    t_b: f64,
    source: NoiseSource,
    cfg: &IntegratorConfig,
) -> Result<MapPair, MarkovError> {
    let t_in = p.t_in();
    if !(t_a >= t_in && t_b >= t_a) {
        return Err(MarkovError::InvalidInput(format!(
            "need t_in = {t_in} ≤ t_a = {t_a} ≤ t_b = {t_b}"
        )));
    }
    let start = if t_a == t_in {
        vacuum_initial(p)
    } else {
        let c = IntegratorConfig {
            t_end_policy: TEndPolicy::At(t_a),
            ..*cfg
        };
        integrate_at(p, &c, &[t_a])?.samples[0]
    };

    let h_s = system_hamiltonian(p);
    let kh = Mat2::OMEGA * h_s;
    let opts = OdeOptions {
        rtol: cfg.rtol,
        atol: cfg.atol,
        h_min: cfg.h_min,
        h_max: cfg.max_step_for(p),
    };

    let mut cuts = vec![t_a];
    if p.profile == Profile::IsosoTopHat {
        cuts.extend([-p.t0, p.t0].into_iter().filter(|&c| c > t_a && c < t_b));
    }
    cuts.push(t_b);

    let mut y = pack(&start.sigma, &Mat2::IDENTITY, &Mat2::ZERO);
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b == a {
            continue;
        }
        let mid = 0.5 * (a + b);
        let xi_at = |t: f64| match p.profile {
            Profile::IsosoTopHat => coupling_xi(mid, p),
            Profile::Smooth => coupling_xi(t, p),
        };
        let f = |t: f64, v: &[f64; N]| {
            let (sigma, x, yy) = unpack(v);
            let xi = xi_at(t);
            let dsig = transport_rhs_xi(xi, &sigma, p);
            let st = CovarianceState::from_sigma(t, sigma);
            let noise = noise_b_xi(&st, xi);
            let b = match source {
                NoiseSource::Exact => noise.b,
                NoiseSource::Surrogate(kind) => {
                    let s = st.system_block();
                    surrogate_b(kind, &s, st.det_s, &noise).0
                }
            };
            let m = kh * yy;
            pack(&dsig, &(kh * x), &(m + m.transpose() + b))
        };
        let mut solver = Dopri5::new(f, a, y, opts);
        solver
            .advance_to(b, |_, _, _| {})
            .map_err(|e| MarkovError::Transport(e.into()))?;
        y = *solver.y();
    }
    let (_, x, yy) = unpack(&y);
    Ok(MapPair { x, y: yy, t_a, t_b })
}

/// Exact free propagator `exp(Ω𝓗_S δt)`.
fn free_rotation(omega: f64, dt: f64) -> Mat2 {
    let (s, c) = (omega * dt).sin_cos();
    Mat2::new(c, s / omega, -omega * s, c)
}

/// Leading-order map over `[t, t + δt]` with the noise frozen at `t`:
/// `X = exp(Ω𝓗_S δt)`, `Y = δt·X(δt/2) B Xᵀ(δt/2)`.
pub fn infinitesimal_pair(
    state: &CovarianceState,
    p: &ScenarioParams,
    xi: f64,
    source: NoiseSource,
    dt: f64,
) -> MapPair {
    let noise = noise_b_xi(state, xi);
    let b = match source {
        NoiseSource::Exact => noise.b,
        NoiseSource::Surrogate(kind) => surrogate_b(kind, &state.system_block(), state.det_s, &noise).0,
    };
    let half = free_rotation(p.omega_s, 0.5 * dt);
    MapPair {
        x: free_rotation(p.omega_s, dt),
        y: (half * b * half.transpose()).scale(dt).symmetrize(),
        t_a: state.t,
        t_b: state.t + dt,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpCheck {
    pub min_eigenvalue: f64,
    pub completely_positive: bool,
}

pub const CP_REL_TOL: f64 = 1e-12;
pub const CP_ABS_TOL: f64 = 1e-15;

/// Smallest eigenvalue of the Hermitian `Y + iΩ − iXΩXᵀ`.
///
/// For 2×2 blocks `XΩXᵀ = det(X)·Ω`, so the imaginary part is
/// `(1 − det X)Ω` and the eigenvalues are closed form. Negative values down
/// to `CP_REL_TOL·‖Y‖ + CP_ABS_TOL` count as round-off.
pub fn cp_check(pair: &MapPair) -> CpCheck {
    let y = pair.y;
    let alpha = 1.0 - pair.x.det();
    let mean = 0.5 * (y.a11() + y.a22());
    let half_diff = 0.5 * (y.a11() - y.a22());
    let r = (half_diff * half_diff + y.a12() * y.a12() + alpha * alpha).sqrt();
    let min_eigenvalue = mean - r;
    let tol = CP_REL_TOL * y.frobenius() + CP_ABS_TOL;
    CpCheck {
        min_eigenvalue,
        completely_positive: min_eigenvalue >= -tol,
    }
}
