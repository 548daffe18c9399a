use std::io::{self, Write};

use cho_model::{AdiabaticFrame, ScenarioParams};
use num_complex::Complex64 as C64;

use cho_symplectic::{compound2, purity_from_det, Mat2, Mat4, PAIRS};

use crate::{bogoliubov_coeffs, regime_purity, BCorrelators, BogoliubovSet, ExpansionCase, IsosoError};

/// Matching data for one parameter set, reusable across many times.
#[derive(Debug, Clone, Copy)]
pub struct IsosoSolution {
    pub params: ScenarioParams,
    pub coeffs: BogoliubovSet,
    pub correlators: BCorrelators,
}

impl IsosoSolution {
    pub fn new(p: &ScenarioParams) -> Result<Self, IsosoError> {
        let coeffs = bogoliubov_coeffs(p)?;
        Ok(IsosoSolution {
            params: *p,
            coeffs,
            correlators: coeffs.correlators(),
        })
    }

    /// `σ_S` a time `dt` after switch-on (`0 ≤ dt ≤ 2t₀`).
    pub fn sigma_s(&self, dt: f64) -> Mat2 {
        let (u, v) = self.coeffs.system_weights(dt);
        let c = &self.correlators;
        let xx = c.contract(&u, &u).re;
        let pp = c.contract(&v, &v).re;
        let xp = (c.contract(&u, &v) + c.contract(&v, &u)).re;
        Mat2::sym(2.0 * xx, xp, 2.0 * pp)
    }

    /// `det σ_S` without forming σ_S.
    ///
    /// Supercritically σ_S's entries and its determinant both grow like
    /// `e^{2|ω₁|Δt}`, so `σ₁₁σ₂₂ − σ₁₂²` cancels two terms of size
    /// `e^{4|ω₁|Δt}`. Instead: `σ_S = Φ σ₀ Φᵀ` with Φ the two system rows of
    /// the propagator, so by Cauchy–Binet `det σ_S = mᵀ Λ²σ₀ m` over the
    /// 2×2 minors `m` of Φ. In the normal-mode basis those minors are
    /// products of mode functions (the same-mode ones are Wronskians, = 1),
    /// and `Λ²σ₀` is positive definite: no cancellation anywhere.
    pub fn det_sigma_s(&self, dt: f64) -> f64 {
        let b = &self.coeffs;
        let p = &self.params;
        let (c, s) = (b.theta.cos(), b.theta.sin());
        // C = cos ωΔt, S = sin(ωΔt)/ω; real for either sign of ω²
        let mode = |w: C64| {
            let ph = w * dt;
            let cc = ph.cos().re;
            let ss = if w.norm() == 0.0 { dt } else { (ph.sin() / w).re };
            let w2 = (w * w).re;
            (cc, ss, -w2 * ss, cc)
        };
        let (c1, s1, dc1, ds1) = mode(b.omega1);
        let (c2, s2, dc2, ds2) = mode(C64::new(b.omega2, 0.0));
        // mode-basis order (x₁, p₁, x₂, p₂)
        let rx = [c * c1, c * s1, s * c2, s * s2];
        let rp = [c * dc1, c * ds1, s * dc2, s * ds2];
        let minor = |i: usize, j: usize| rx[i] * rp[j] - rx[j] * rp[i];
        let m = [c * c, minor(0, 2), minor(0, 3), minor(1, 2), minor(1, 3), s * s];
        debug_assert_eq!(PAIRS[0], (0, 1));

        // edge state in the mode basis
        let rot = Mat4([[c, 0.0, -s, 0.0], [0.0, c, 0.0, -s], [s, 0.0, c, 0.0], [0.0, s, 0.0, c]]);
        let s0 = Mat4::diag([1.0 / p.omega_s, p.omega_s, 1.0 / p.omega_e, p.omega_e]);
        let q = compound2(&(rot * s0 * rot.transpose()));
        let mut det = 0.0;
        for i in 0..6 {
            for j in 0..6 {
                det += m[i] * q[i][j] * m[j];
            }
        }
        det
    }

    /// Purity at time `t`: 1 before the window, frozen after it.
    pub fn purity(&self, t: f64) -> Result<f64, IsosoError> {
        let t0 = self.params.t0;
        if t <= -t0 {
            return Ok(1.0);
        }
        let dt = t.min(t0) + t0;
        Ok(purity_from_det(self.det_sigma_s(dt))?)
    }
}

pub fn isoso_sigma_s(dt: f64, p: &ScenarioParams) -> Result<Mat2, IsosoError> {
    Ok(IsosoSolution::new(p)?.sigma_s(dt))
}

pub fn isoso_purity(t: f64, p: &ScenarioParams) -> Result<f64, IsosoError> {
    IsosoSolution::new(p)?.purity(t)
}

/// `|ω₁|` at the plateau if the coupling is supercritical.
pub fn decoherence_rate(p: &ScenarioParams) -> Option<f64> {
    if !p.is_supercritical() {
        return None;
    }
    AdiabaticFrame::from_coupling(p.omega_s, p.omega_e, p.xi0, 0.0)
        .ok()
        .map(|f| f.omega1_abs)
}

/// `t,purity_analytic[,purity_expansion]`.
pub fn write_csv<W: Write>(
    mut out: W,
    times: &[f64],
    p: &ScenarioParams,
    case: Option<ExpansionCase>,
) -> io::Result<()> {
    let sol = IsosoSolution::new(p).map_err(io::Error::other)?;
    match case {
        Some(_) => writeln!(out, "t,purity_analytic,purity_expansion")?,
        None => writeln!(out, "t,purity_analytic")?,
    }
    for &t in times {
        let g = sol.purity(t).map_err(io::Error::other)?;
        write!(out, "{t:.16e},{g:.16e}")?;
        if let Some(c) = case {
            let dt = (t.min(p.t0) + p.t0).max(0.0);
            let e = regime_purity(c, dt, p).map_err(io::Error::other)?;
            write!(out, ",{e:.16e}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}
