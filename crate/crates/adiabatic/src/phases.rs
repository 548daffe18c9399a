use std::f64::consts::PI;

use cho_model::{adiabatic_frame, AdiabaticFrame, ModelError, Profile, ScenarioParams};
use cho_transport::quad::{self, gk15, QuadOptions};

use crate::AdiabaticError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Panel width cap as a fraction of the shortest period `2π/ω₂`.
    pub panel_fraction: f64,
}

impl Default for AdiabaticConfig {
    fn default() -> Self {
        AdiabaticConfig {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            panel_fraction: 0.125,
        }
    }
}

impl AdiabaticConfig {
    pub(crate) fn quad_options(&self) -> QuadOptions {
        QuadOptions {
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            ..QuadOptions::default()
        }
    }

    pub(crate) fn validate(&self) -> Result<(), AdiabaticError> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0 && self.panel_fraction > 0.0) {
            return Err(AdiabaticError::InvalidInput("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// Frame that refuses to leave the subcritical domain.
pub(crate) fn subcritical_frame(t: f64, p: &ScenarioParams) -> Result<AdiabaticFrame, AdiabaticError> {
    let f = adiabatic_frame(t, p).map_err(|e| match e {
        ModelError::CriticalPoint { .. } => AdiabaticError::CriticalPoint { t },
        e => e.into(),
    })?;
    if f.is_supercritical() {
        return Err(AdiabaticError::SupercriticalExcursion { t });
    }
    Ok(f)
}

pub(crate) fn require_smooth_subcritical(p: &ScenarioParams) -> Result<(), AdiabaticError> {
    if p.profile != Profile::Smooth {
        return Err(AdiabaticError::NonSmoothProfile);
    }
    // ξ peaks at ξ₀ (t = 0)
    subcritical_frame(0.0, p).map(|_| ())
}

/// Nodes from `t_in` to `t_end`: spacing at most `panel_fraction·2π/ω₂,max`
/// and `τ/8`, with `extra` times merged in.
pub fn phase_grid(p: &ScenarioParams, t_end: f64, extra: &[f64], cfg: &AdiabaticConfig) -> Vec<f64> {
    let t_in = p.t_in();
    let mut h = cfg.panel_fraction * 2.0 * PI / p.omega2_max();
    if p.profile == Profile::Smooth {
        h = h.min(p.tau / 8.0);
    }
    let n = ((t_end - t_in) / h).ceil().max(1.0) as usize;
    let mut g: Vec<f64> = (0..=n).map(|k| t_in + (t_end - t_in) * k as f64 / n as f64).collect();
    g.extend(extra.iter().copied().filter(|&t| t > t_in && t < t_end));
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

/// Accumulated phases `W_i(t) = ∫_{t_in}^t ω_i` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseAccumulator {
    pub grid: Vec<f64>,
    pub w1: Vec<f64>,
    pub w2: Vec<f64>,
    params: ScenarioParams,
}

impl PhaseAccumulator {
    fn segment(&self, t: f64) -> usize {
        match self.grid.binary_search_by(|x| x.total_cmp(&t)) {
            Ok(k) => k,
            Err(k) => k.saturating_sub(1).min(self.grid.len() - 1),
        }
    }

    /// `(W₁, W₂)` anywhere inside the grid: nearest node below plus a single
    /// GK15 panel, which is exact to rounding on these short smooth pieces.
    pub fn at(&self, t: f64) -> (f64, f64) {
        let k = self.segment(t);
        let t0 = self.grid[k];
        if t == t0 {
            return (self.w1[k], self.w2[k]);
        }
        let p = self.params;
        let mut f = |s: f64| match adiabatic_frame(s, &p) {
            Ok(fr) => [fr.omega1_abs, fr.omega2],
            Err(_) => [f64::NAN; 2],
        };
        let (v, _) = gk15(&mut f, t0, t);
        (self.w1[k] + v[0], self.w2[k] + v[1])
    }
}

/// Cumulative quadrature of the normal frequencies from `t_in` over `grid`
/// (which must start at `t_in`).
pub fn accumulate_phases(
    p: &ScenarioParams,
    grid: &[f64],
    cfg: &AdiabaticConfig,
) -> Result<PhaseAccumulator, AdiabaticError> {
    cfg.validate()?;
    if grid.len() < 2 || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(AdiabaticError::InvalidInput(
            "grid must be increasing with at least two nodes".into(),
        ));
    }
    for &t in grid {
        subcritical_frame(t, p)?;
    }
    let mut bad = None;
    let vals = quad::cumulative(
        |s: f64| match subcritical_frame(s, p) {
            Ok(f) => [f.omega1_abs, f.omega2],
            Err(e) => {
                bad.get_or_insert(e);
                [0.0; 2]
            }
        },
        grid,
        &cfg.quad_options(),
    )?;
    if let Some(e) = bad {
        return Err(e);
    }
    Ok(PhaseAccumulator {
        grid: grid.to_vec(),
        w1: vals.iter().map(|v| v[0]).collect(),
        w2: vals.iter().map(|v| v[1]).collect(),
        params: *p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_phases_are_linear() {
        let p = ScenarioParams::smooth(1.0, 2.0, 0.0, 1.0, 5.0).unwrap();
        let g = phase_grid(&p, 3.0, &[], &AdiabaticConfig::default());
        let ph = accumulate_phases(&p, &g, &AdiabaticConfig::default()).unwrap();
        assert_eq!(ph.w1[0], 0.0);
        assert_eq!(ph.w2[0], 0.0);
        for (k, t) in g.iter().enumerate() {
            assert!((ph.w1[k] - (t - p.t_in())).abs() < 1e-10);
            assert!((ph.w2[k] - 2.0 * (t - p.t_in())).abs() < 1e-10);
        }
        let (a, b) = ph.at(0.123);
        assert!((a - (0.123 - p.t_in())).abs() < 1e-10 && (b - 2.0 * (0.123 - p.t_in())).abs() < 1e-10);
    }

    #[test]
    fn phase_matches_trapezoid() {
        let p = ScenarioParams::smooth(1.0, 2.0, 0.9, 1.0, 50.0).unwrap();
        let g = phase_grid(&p, 0.0, &[], &AdiabaticConfig::default());
        let ph = accumulate_phases(&p, &g, &AdiabaticConfig::default()).unwrap();
        let w1 = *ph.w1.last().unwrap();
        // trapezoid with dt = 1e−4 (error ~ dt²·∫|ω̈|, far below 1e−8 here)
        let dt = 1e-4;
        let n = (-p.t_in() / dt).round() as usize;
        let h = -p.t_in() / n as f64;
        let om = |t: f64| adiabatic_frame(t, &p).unwrap().omega1_abs;
        let mut s = 0.5 * (om(p.t_in()) + om(0.0));
        for k in 1..n {
            s += om(p.t_in() + k as f64 * h);
        }
        let trap = s * h;
        assert!(((w1 - trap) / trap).abs() < 1e-8, "{w1} vs {trap}");
    }

    #[test]
    fn phases_increase() {
        let p = ScenarioParams::smooth(1.0, 3.0, 0.7, 2.0, 4.0).unwrap();
        let g = phase_grid(&p, 20.0, &[], &AdiabaticConfig::default());
        let ph = accumulate_phases(&p, &g, &AdiabaticConfig::default()).unwrap();
        assert!(ph.w1.windows(2).all(|w| w[1] > w[0]));
        assert!(ph.w2.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn supercritical_is_rejected() {
        let p = ScenarioParams::smooth(1.0, 2.0, 1.2, 1.0, 5.0).unwrap();
        let g = phase_grid(&p, 1.0, &[], &AdiabaticConfig::default());
        assert!(matches!(
            accumulate_phases(&p, &g, &AdiabaticConfig::default()),
            Err(AdiabaticError::SupercriticalExcursion { .. })
        ));
    }
}
