use std::f64::consts::PI;

use cho_model::ScenarioParams;
use cho_symplectic::{Mat2, SymplecticError, DET_CLAMP};
use cho_transport::ode::rk4_fixed;
use cho_transport::CovarianceState;

use crate::noise::{noise_b_xi, reduced_rhs, surrogate_b, system_hamiltonian, MarkovSurrogate};
use crate::MarkovError;

/// Purity margin below which the closed-form velocity is singular.
pub const EPS_PURE: f64 = 1e-9;

fn physical_det(s: &Mat2) -> Result<f64, MarkovError> {
    let d = s.det();
    if !(d >= 1.0 - DET_CLAMP) {
        return Err(SymplecticError::NonPhysicalState { det: d }.into());
    }
    Ok(d.max(1.0))
}

/// `F = 2/[√(det(σ₁+σ₂) + Δ) − √Δ]`, `Δ = (det σ₁ − 1)(det σ₂ − 1)`.
pub fn gaussian_fidelity(s1: &Mat2, s2: &Mat2) -> Result<f64, MarkovError> {
    let (d1, d2) = (physical_det(s1)?, physical_det(s2)?);
    let delta = (d1 - 1.0) * (d2 - 1.0);
    let f = 2.0 / (((*s1 + *s2).det() + delta).sqrt() - delta.sqrt());
    Ok(f.min(1.0))
}

/// `√(2(1 − F))`.
pub fn bures_distance(s1: &Mat2, s2: &Mat2) -> Result<f64, MarkovError> {
    Ok((2.0 * (1.0 - gaussian_fidelity(s1, s2)?)).max(0.0).sqrt())
}

/// Bures distance between `σ` and `σ + E` for small `E`, rearranged so that
/// every term is already second order in `E`.
///
/// With `d = det σ`, `a = Tr(adj σ·E)`, `e = det E`, `u = (a+e)/(d−1)` and
/// `s = √(1+u)`, the fidelity denominator is `D = 2 + N/(√(X+Δ) + 2 + √Δ)`
/// where `N = [2au/(1+s) + e(s−3)]/(1+s)`. Needs a mixed `σ`.
fn bures_distance_near(sigma: &Mat2, e: &Mat2) -> Result<f64, MarkovError> {
    let d = physical_det(sigma)?;
    let dm1 = d - 1.0;
    if dm1 <= 0.0 {
        return bures_distance(sigma, &(*sigma + *e));
    }
    physical_det(&(*sigma + *e))?;
    let a = (sigma.adjugate() * *e).trace();
    let ee = e.det();
    let u = (a + ee) / dm1;
    let s = (1.0 + u).sqrt();
    let num = (2.0 * a * u / (1.0 + s) + ee * (s - 3.0)) / (1.0 + s);
    let x = 4.0 * d + 2.0 * a + ee;
    let delta = dm1 * (dm1 + a + ee);
    let den = (x + delta).sqrt() + 2.0 + delta.max(0.0).sqrt();
    let d_minus_2 = num / den;
    // 1 − F = (D − 2)/D
    let one_minus_f = d_minus_2 / (2.0 + d_minus_2);
    Ok((2.0 * one_minus_f).max(0.0).sqrt())
}

/// Closed-form Bures velocity `det σ_S/(2√(det²σ_S − 1))·|Tr[σ_S⁻¹(B − B̃)]|`.
///
/// `xi` is the coupling in force at the state's time. Returns the velocity
/// and the surrogate actually used.
pub fn bures_velocity(
    state: &CovarianceState,
    xi: f64,
    surrogate: MarkovSurrogate,
) -> Result<(f64, MarkovSurrogate), MarkovError> {
    let sigma = state.system_block();
    let det = state.det_s;
    if !(det >= 1.0 - DET_CLAMP) {
        return Err(SymplecticError::NonPhysicalState { det }.into());
    }
    let noise = noise_b_xi(state, xi);
    let (bt, used) = surrogate_b(surrogate, &sigma, det, &noise);
    let adj = sigma.adjugate();
    // Tr(σ⁻¹M) = Tr(adj σ·M)/det σ
    let tr = (adj * (noise.b - bt)).trace() / det;
    let scale = ((adj * noise.b).trace().abs() + (adj * bt).trace().abs()) / det;
    let gamma = 1.0 / det.sqrt();
    if gamma >= 1.0 - EPS_PURE {
        if tr.abs() <= 1e-12 * scale || scale == 0.0 {
            return Ok((0.0, used));
        }
        return Err(MarkovError::PureStateSingularity);
    }
    let dm1 = det - 1.0;
    Ok((det / (2.0 * (dm1 * (det + 1.0)).sqrt()) * tr.abs(), used))
}

/// One step of the reduced equation with `B` frozen, returning
/// `(σ_S(t+δt), σ_S(t+δt) − σ̃_S(t+δt))`.
pub fn fd_step(sigma: &Mat2, b: &Mat2, b_tilde: &Mat2, h_s: &Mat2, dt: f64) -> (Mat2, Mat2) {
    let to = |m: &Mat2| [m.a11(), m.a12(), m.a22()];
    let from = |v: &[f64; 3]| Mat2::sym(v[0], v[1], v[2]);
    let step = |s0: &Mat2, drive: &Mat2| {
        from(&rk4_fixed(
            |_, v: &[f64; 3]| to(&reduced_rhs(&from(v), drive, h_s)),
            0.0,
            to(s0),
            dt,
            dt,
        ))
    };
    // the difference obeys the same linear equation, driven by B − B̃ from 0
    (step(sigma, b), step(&Mat2::ZERO, &(*b - *b_tilde)))
}

/// Finite-difference Bures velocity `B[σ_S(t+δt), σ̃_S(t+δt)]/δt` with
/// `δt = 10⁻⁶·2π/ω₂,max`.
pub fn bures_velocity_fd(
    state: &CovarianceState,
    xi: f64,
    p: &ScenarioParams,
    surrogate: MarkovSurrogate,
) -> Result<f64, MarkovError> {
    let dt = 1e-6 * 2.0 * PI / p.omega2_max();
    let sigma = state.system_block();
    let noise = noise_b_xi(state, xi);
    let (bt, _) = surrogate_b(surrogate, &sigma, state.det_s, &noise);
    let (s1, diff) = fd_step(&sigma, &noise.b, &bt, &system_hamiltonian(p), dt);
    Ok(bures_distance_near(&s1, &(-diff))? / dt)
}


#[cfg(test)]
mod rank_tests {
    use super::*;

    fn closed(sigma: &Mat2, db: &Mat2) -> f64 {
        let d = sigma.det();
        d / (2.0 * (d * d - 1.0).sqrt()) * (sigma.inverse().unwrap() * *db).trace().abs()
    }

    fn fd(sigma: &Mat2, db: &Mat2) -> f64 {
        let dt = 1e-7;
        let h = Mat2::diag(1.0, 1.0);
        let (s1, diff) = fd_step(sigma, db, &Mat2::ZERO, &h, dt);
        bures_distance_near(&s1, &(-diff)).unwrap() / dt
    }

    // The closed form is the first-order expansion of the distance only
    // when the two drives differ by a rank-one matrix.
    #[test]
    fn closed_form_exact_for_rank_one_differences() {
        let sigma = Mat2::sym(1.3, 0.4, 1.1);
        for v in [[1.0, 0.0], [0.0, 1.0], [0.6, -0.8], [1.0, 2.0]] {
            for sign in [1.0, -1.0] {
                let db = Mat2::sym(v[0] * v[0], v[0] * v[1], v[1] * v[1]).scale(sign);
                let (c, f) = (closed(&sigma, &db), fd(&sigma, &db));
                assert!((c - f).abs() < 1e-5 * c, "{v:?}: {c} {f}");
            }
        }
    }

    #[test]
    fn closed_form_differs_for_rank_two_differences() {
        let sigma = Mat2::sym(1.3, 0.4, 1.1);
        let db = Mat2::sym(0.0, 1.0, 0.0);
        let ratio = fd(&sigma, &db) / closed(&sigma, &db);
        assert!((ratio - 1.358).abs() < 2e-3, "{ratio}");
    }
}
