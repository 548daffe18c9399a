use std::io::{self, Write};

use cho_model::{coupling_xi, ScenarioParams};
use cho_transport::ode::{Dopri5, OdeOptions};
use cho_transport::{coupling_cutoff_time, run_summary, IntegratorConfig, RunSummary, TEndPolicy};
use rayon::prelude::*;

use crate::AdiabaticError;

fn cutoff_run(p: &ScenarioParams, cfg: &IntegratorConfig) -> Result<RunSummary, AdiabaticError> {
    let cfg = IntegratorConfig {
        t_end_policy: TEndPolicy::CouplingCutoff(1e-10),
        ..*cfg
    };
    Ok(run_summary(p, &cfg)?)
}

/// Frozen purity once `ξ/ξ₀ < 1e−10`, from the exact integrator.
pub fn latetime_purity(p: &ScenarioParams, cfg: &IntegratorConfig) -> Result<f64, AdiabaticError> {
    Ok(cutoff_run(p, cfg)?.gamma_end)
}

/// `1 − γ∞` resolved far below the purity's own rounding floor.
///
/// Evolves the symplectic propagator `N` in vacuum-normalized coordinates
/// (`σ₀ = 1`), so that `det σ_S = Σ m_ab²` over the 2×2 minors of its system
/// rows. With `m_xp(S) + m_xp(E) = 1` this becomes
/// `det σ_S − 1 = Σ_cross m² − 2 m_SS m_EE`: every term is built from the
/// small S–E entries of `N` directly, instead of as `det σ_S` minus one.
pub fn latetime_loss(p: &ScenarioParams, cfg: &IntegratorConfig) -> Result<f64, AdiabaticError> {
    p.validate().map_err(cho_transport::TransportError::from)?;
    cfg.validate()?;
    if p.xi0 == 0.0 {
        return Ok(0.0);
    }
    let (ws, we) = (p.omega_s, p.omega_e);
    // K_n = S₀⁻¹ K S₀ with S₀ = diag(ω_S^−½, ω_S^½, ω_E^−½, ω_E^½)
    let cross = 1.0 / (ws * we).sqrt();
    let rhs = |t: f64, y: &[f64; 16]| {
        let xi = coupling_xi(t, p) * cross;
        let mut d = [0.0; 16];
        for c in 0..4 {
            let (x1, p1, x2, p2) = (y[c], y[4 + c], y[8 + c], y[12 + c]);
            d[c] = ws * p1;
            d[4 + c] = -ws * x1 - xi * x2;
            d[8 + c] = we * p2;
            d[12 + c] = -xi * x1 - we * x2;
        }
        d
    };
    let mut y = [0.0; 16];
    for k in 0..4 {
        y[5 * k] = 1.0;
    }
    let opts = OdeOptions {
        rtol: cfg.rtol,
        atol: cfg.atol,
        h_min: cfg.h_min,
        h_max: cfg.max_step_for(p),
    };
    let mut ode = Dopri5::new(rhs, p.t_in(), y, opts);
    ode.advance_to(coupling_cutoff_time(p, 1e-10), |_, _, _| {})
        .map_err(cho_transport::TransportError::from)?;
    let n = ode.y();
    let m = |a: usize, b: usize| n[a] * n[4 + b] - n[b] * n[4 + a];
    let d = m(0, 2).powi(2) + m(0, 3).powi(2) + m(1, 2).powi(2) + m(1, 3).powi(2) - 2.0 * m(0, 1) * m(2, 3);
    Ok(-(-0.5 * d.ln_1p()).exp_m1())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopePoint {
    pub tau_over_t0: f64,
    pub one_minus_gamma: f64,
    /// Relative change of `1 − γ∞` when the integrator tolerance is
    /// tightened tenfold.
    pub rel_uncertainty: f64,
    /// `−d ln(1−γ∞)/d ln(τ/t₀)`, i.e. the local power-law exponent; `None`
    /// when this point or a neighbour used for the difference is unresolved.
    pub slope: Option<f64>,
    pub resolved: bool,
}

/// Points whose loss moves by more than this under a tenfold tolerance
/// tightening are flagged rather than differenced.
pub const RESOLUTION_TOL: f64 = 1e-2;

/// Local exponents `−d ln y/d ln x` by centered differences on the log
/// grid (one-sided at the ends). Entries that are `None` or whose stencil
/// touches a `None` are `None`.
pub fn log_log_slopes(x: &[f64], y: &[Option<f64>]) -> Result<Vec<Option<f64>>, AdiabaticError> {
    if x.len() != y.len() {
        return Err(AdiabaticError::InvalidInput("length mismatch".into()));
    }
    if x.len() < 2 {
        return Err(AdiabaticError::InvalidInput(
            "need at least two grid points for a derivative".into(),
        ));
    }
    if x.windows(2).any(|w| !(w[1] > w[0])) || x[0] <= 0.0 {
        return Err(AdiabaticError::InvalidInput(
            "grid must be positive and increasing".into(),
        ));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<Option<f64>> = y.iter().map(|v| v.filter(|&v| v > 0.0).map(f64::ln)).collect();
    let n = x.len();
    Ok((0..n)
        .map(|i| {
            let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
            ly[i]?;
            Some(-(ly[b]? - ly[a]?) / (lx[b] - lx[a]))
        })
        .collect())
}

/// Effective power-law exponent of `1 − γ∞` along a grid of `τ/t₀`.
///
/// If the late-time purity loss were analytic in the adiabatic parameter
/// `t₀/τ` it would eventually follow a power law and the exponent would
/// plateau; a steadily growing exponent signals exponential suppression.
/// Each point is computed at `cfg` and at a tenfold tighter tolerance;
/// points where the two disagree are flagged, never differenced.
pub fn nonanalyticity_slope(
    p: &ScenarioParams,
    tau_over_t0: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<SlopePoint>, AdiabaticError> {
    if tau_over_t0.len() < 2 {
        return Err(AdiabaticError::InvalidInput(
            "need at least two grid points for a derivative".into(),
        ));
    }
    let tight = IntegratorConfig {
        rtol: 0.1 * cfg.rtol,
        atol: 0.1 * cfg.atol,
        ..*cfg
    };
    let loss: Vec<(f64, f64)> = tau_over_t0
        .par_iter()
        .map(|&r| {
            let q = p.with_tau(r * p.t0);
            let (a, b) = (latetime_loss(&q, cfg)?, latetime_loss(&q, &tight)?);
            Ok((b, if b > 0.0 { (a - b).abs() / b } else { f64::INFINITY }))
        })
        .collect::<Result<_, AdiabaticError>>()?;
    let y: Vec<Option<f64>> = loss.iter().map(|&(l, u)| (u <= RESOLUTION_TOL).then_some(l)).collect();
    let slopes = log_log_slopes(tau_over_t0, &y)?;
    Ok(tau_over_t0
        .iter()
        .zip(loss)
        .zip(slopes)
        .map(|((&r, (l, u)), s)| SlopePoint {
            tau_over_t0: r,
            one_minus_gamma: l,
            rel_uncertainty: u,
            slope: s,
            resolved: u <= RESOLUTION_TOL,
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdPoint {
    pub tau_over_t0: f64,
    pub t_omega_thr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdScan {
    pub points: Vec<ThresholdPoint>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Parameters at `T_ω = ω_S/(ω_E − ω_S)` with `ψ` held fixed.
fn at_t_omega(base: &ScenarioParams, tau_over_t0: f64, t_omega: f64) -> ScenarioParams {
    base.with_omega_e_fixed_psi(base.omega_s * (1.0 + 1.0 / t_omega))
        .with_tau(tau_over_t0 * base.t0)
}

fn recoheres(p: &ScenarioParams, criterion: f64, cfg: &IntegratorConfig) -> Result<bool, AdiabaticError> {
    let s = cutoff_run(p, cfg)?;
    Ok(1.0 - s.gamma_end < criterion * (1.0 - s.gamma_min))
}

fn threshold_for(
    base: &ScenarioParams,
    r: f64,
    t_grid: &[f64],
    criterion: f64,
    cfg: &IntegratorConfig,
) -> Result<f64, AdiabaticError> {
    let ok: Vec<bool> = t_grid
        .iter()
        .map(|&tw| recoheres(&at_t_omega(base, r, tw), criterion, cfg))
        .collect::<Result<_, _>>()?;
    // largest grid value that still recoheres
    let Some(k) = ok.iter().rposition(|&b| b) else {
        return Err(AdiabaticError::NoThreshold { tau_over_t0: r });
    };
    if k + 1 == t_grid.len() {
        return Ok(t_grid[k]);
    }
    let (mut lo, mut hi) = (t_grid[k], t_grid[k + 1]);
    while hi - lo > 0.01 * lo {
        let m = 0.5 * (lo + hi);
        if recoheres(&at_t_omega(base, r, m), criterion, cfg)? {
            lo = m;
        } else {
            hi = m;
        }
    }
    Ok(lo)
}

/// For each `τ/t₀`, the largest `T_ω` at which `1 − γ∞ < criterion·(1 − γ_min)`,
/// bisected to 1% from the bracketing grid cells, plus a least-squares line
/// through `T_ω^thr(τ/t₀)`.
pub fn recoherence_threshold_scan(
    base: &ScenarioParams,
    tau_over_t0: &[f64],
    t_omega_grid: &[f64],
    criterion: f64,
    cfg: &IntegratorConfig,
) -> Result<ThresholdScan, AdiabaticError> {
    if tau_over_t0.is_empty() || t_omega_grid.is_empty() {
        return Err(AdiabaticError::InvalidInput("empty grid".into()));
    }
    if tau_over_t0.iter().chain(t_omega_grid).any(|&v| !(v > 0.0)) || !(criterion > 0.0) {
        return Err(AdiabaticError::InvalidInput(
            "grids and criterion must be positive".into(),
        ));
    }
    let mut tg = t_omega_grid.to_vec();
    tg.sort_by(f64::total_cmp);
    let points: Vec<ThresholdPoint> = tau_over_t0
        .par_iter()
        .map(|&r| {
            threshold_for(base, r, &tg, criterion, cfg).map(|t| ThresholdPoint {
                tau_over_t0: r,
                t_omega_thr: t,
            })
        })
        .collect::<Result<_, _>>()?;
    let (slope, intercept, r_squared) = linear_fit(
        &points.iter().map(|q| q.tau_over_t0).collect::<Vec<_>>(),
        &points.iter().map(|q| q.t_omega_thr).collect::<Vec<_>>(),
    );
    Ok(ThresholdScan {
        points,
        slope,
        intercept,
        r_squared,
    })
}

/// Ordinary least squares `y = a x + b`; returns `(a, b, R²)`.
fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    if sxx == 0.0 {
        return (f64::NAN, my, f64::NAN);
    }
    let a = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (a, my - a * mx, r2)
}

/// CSV with header `tau_over_t0,T_omega_thr,slope_fit,r_squared`.
pub fn write_scan_csv<W: Write>(mut out: W, scan: &ThresholdScan) -> io::Result<()> {
    writeln!(out, "tau_over_t0,T_omega_thr,slope_fit,r_squared")?;
    for q in &scan.points {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e}",
            q.tau_over_t0, q.t_omega_thr, scan.slope, scan.r_squared
        )?;
    }
    Ok(())
}
