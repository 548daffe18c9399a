//! Second-order (Dyson-series) purity of the system oscillator.
//!
//! ```text
//! γ(t) = 1 − ¼ ∬ λ(t′)λ(t″) { [1 − 2Θ(t′−t″)] cos[(ω_E−ω_S)(t′−t″)]
//!                            + [1 + 2Θ(t′−t″)] cos[(ω_S+ω_E)(t′−t″)] }
//! ```
//!
//! over `[t_in, t]²`, with `Θ(0) = ½`.

use std::f64::consts::PI;
use std::io::{self, Write};

use cho_model::{lambda, perturbativity_gp, ScenarioParams};
use cho_transport::quad::{self, QuadError, QuadOptions};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PerturbationError {
    #[error("quadrature did not converge: {0}")]
    QuadratureNoConvergence(#[from] QuadError),
    #[error("invalid quadrature configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("write failed: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_depth: 40,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<(), PerturbationError> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(PerturbationError::InvalidConfig("tolerances must be positive"));
        }
        if self.max_depth == 0 {
            return Err(PerturbationError::InvalidConfig("max_depth must be positive"));
        }
        Ok(())
    }
}

fn step(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        0.0
    } else {
        0.5
    }
}

/// The bracketed kernel of the double integral, without the `λλ′` factor.
pub fn kernel(t1: f64, t2: f64, p: &ScenarioParams) -> f64 {
    let u = t1 - t2;
    let th = step(u);
    (1.0 - 2.0 * th) * ((p.omega_e - p.omega_s) * u).cos() + (1.0 + 2.0 * th) * ((p.omega_s + p.omega_e) * u).cos()
}

/// `½[K(t₁,t₂) + K(t₂,t₁)]`. Only this combination survives the square
/// integration, so each unordered pair needs to be visited once.
pub fn kernel_symmetrized(t1: f64, t2: f64, p: &ScenarioParams) -> f64 {
    0.5 * (kernel(t1, t2, p) + kernel(t2, t1, p))
}

/// Second-order purity at time `t` for an arbitrary coupling profile.
///
/// The square is folded onto the triangle `t″ ≤ t′` with the symmetrized
/// kernel (doubling it), then integrated as an outer adaptive quadrature
/// over `t′` whose integrand is itself an adaptive quadrature over `t″`.
pub fn purity_o2_quadrature(t: f64, p: &ScenarioParams, q: &QuadratureConfig) -> Result<f64, PerturbationError> {
    q.validate()?;
    let t_in = p.t_in();
    if t <= t_in || p.xi0 == 0.0 {
        return Ok(1.0);
    }
    // the fast phase ω_S+ω_E sets the resolution; half a period per panel
    let panel = PI / (p.omega_s + p.omega_e);
    let outer = QuadOptions {
        abs_tol: q.abs_tol,
        rel_tol: q.rel_tol,
        max_depth: q.max_depth,
        max_panel: panel,
    };
    // inner errors accumulate across the outer window
    let inner = QuadOptions {
        abs_tol: q.abs_tol / (t - t_in).max(1.0),
        ..outer
    };
    let mut failure = None;
    let r = quad::integrate(
        |t1: f64| {
            let l1 = lambda(t1, p);
            if l1 == 0.0 || failure.is_some() {
                return 0.0;
            }
            match quad::integrate(
                |t2: f64| lambda(t2, p) * kernel_symmetrized(t1, t2, p),
                t_in,
                t1,
                &inner,
            ) {
                Ok(r) => l1 * r.value,
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            }
        },
        t_in,
        t,
        &outer,
    )?;
    if let Some(e) = failure {
        return Err(e.into());
    }
    Ok(1.0 - 0.25 * 2.0 * r.value)
}

/// Closed form for the top-hat profile, `dt` measured from the switch-on.
/// Frozen outside the window, where the coupling vanishes.
pub fn purity_o2_isoso(dt: f64, p: &ScenarioParams) -> f64 {
    let dt = dt.clamp(0.0, 2.0 * p.t0);
    let g = perturbativity_gp(p);
    let w = p.w();
    let s = (0.5 * (p.omega_s + p.omega_e) * dt).sin();
    1.0 - 4.0 * g * g * (1.0 + w * w) / (1.0 + w).powi(2) * s * s
}

/// CSV with header `t,purity_o2`.
pub fn write_csv<W: Write>(
    mut out: W,
    times: &[f64],
    p: &ScenarioParams,
    q: &QuadratureConfig,
) -> Result<(), PerturbationError> {
    let io = |e: io::Error| PerturbationError::Io(e.to_string());
    writeln!(out, "t,purity_o2").map_err(io)?;
    for &t in times {
        let g = purity_o2_quadrature(t, p, q)?;
        writeln!(out, "{t:.16e},{g:.16e}").map_err(io)?;
    }
    Ok(())
}
