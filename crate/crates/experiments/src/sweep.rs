//! Parameter sweeps. Work is split across a rayon pool of the requested
//! size, and results are always collected in grid order, so the output does
//! not depend on the number of workers.

use std::io::Write;
use std::path::PathBuf;

use cho_adiabatic::{latetime_purity, nonanalyticity_slope, recoherence_threshold_scan, write_scan_csv};
use cho_model::ScenarioParams;
use cho_transport::IntegratorConfig;
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::analysis::{create, params_json, SCHEMA};
use crate::config::{RawOutput, RawScenario};
use crate::ExperimentError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisName {
    TauOverT0,
    Tau,
    T0,
    Psi,
    Xi0,
    OmegaS,
    OmegaE,
    TOmega,
}

impl AxisName {
    const ALL: [(AxisName, &'static str); 8] = [
        (AxisName::TauOverT0, "tau_over_t0"),
        (AxisName::Tau, "tau"),
        (AxisName::T0, "t0"),
        (AxisName::Psi, "psi"),
        (AxisName::Xi0, "xi0"),
        (AxisName::OmegaS, "omega_s"),
        (AxisName::OmegaE, "omega_e"),
        (AxisName::TOmega, "T_omega"),
    ];

    pub fn name(&self) -> &'static str {
        Self::ALL.iter().find(|a| a.0 == *self).unwrap().1
    }

    fn parse(s: &str) -> Result<Self, ExperimentError> {
        Self::ALL
            .iter()
            .find(|a| a.1 == s)
            .map(|a| a.0)
            .ok_or_else(|| ExperimentError::Config(format!("unknown sweep axis '{s}'")))
    }

    /// Frequencies move at fixed `ψ`; `T_ω = ω_S/(ω_E − ω_S)` moves `ω_E`.
    pub fn apply(&self, p: &ScenarioParams, v: f64) -> ScenarioParams {
        let psi = p.psi();
        match self {
            AxisName::TauOverT0 => p.with_tau(v * p.t0),
            AxisName::Tau => p.with_tau(v),
            AxisName::T0 => ScenarioParams { t0: v, ..*p },
            AxisName::Psi => p.with_xi0(v * p.omega_s * p.omega_e),
            AxisName::Xi0 => p.with_xi0(v),
            AxisName::OmegaS => ScenarioParams {
                omega_s: v,
                xi0: psi * v * p.omega_e,
                ..*p
            },
            AxisName::OmegaE => p.with_omega_e_fixed_psi(v),
            AxisName::TOmega => p.with_omega_e_fixed_psi(p.omega_s * (1.0 + 1.0 / v)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: AxisName,
    pub grid: GridKind,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(name: AxisName, grid: GridKind, min: f64, max: f64, count: usize) -> Result<Self, ExperimentError> {
        let bad = |m: String| Err(ExperimentError::Config(m));
        if count == 0 {
            return bad(format!("axis {}: empty grid", name.name()));
        }
        if !(min.is_finite() && max.is_finite()) || min > max || (count > 1 && min == max) {
            return bad(format!("axis {}: bounds must satisfy min < max", name.name()));
        }
        if grid == GridKind::Log && !(min > 0.0) {
            return bad(format!("axis {}: log grid needs positive bounds", name.name()));
        }
        Ok(Axis {
            name,
            grid,
            min,
            max,
            count,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let n = (self.count - 1) as f64;
        (0..self.count)
            .map(|k| {
                let s = k as f64 / n;
                match self.grid {
                    GridKind::Linear => self.min + (self.max - self.min) * s,
                    GridKind::Log => self.min * (self.max / self.min).powf(s),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reduction {
    LatetimePurity,
    /// `T_ω^thr` vs `τ/t₀` with the recoherence criterion `c·(1 − γ_min)`.
    Threshold {
        criterion: f64,
    },
    Slope,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: ScenarioParams,
    pub integrator: IntegratorConfig,
    pub reduction: Reduction,
    pub axes: Vec<Axis>,
    pub threads: Option<usize>,
    pub out_dir: PathBuf,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAxis {
    name: String,
    grid: String,
    min: f64,
    max: f64,
    count: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    base: RawScenario,
    reduction: String,
    criterion: Option<f64>,
    threads: Option<usize>,
    axis: Vec<RawAxis>,
    #[serde(default)]
    output: RawOutput,
}

pub fn parse_sweep(text: &str) -> Result<SweepSpec, ExperimentError> {
    let raw: RawSweep = toml::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))?;
    let axes = raw
        .axis
        .iter()
        .map(|a| {
            let grid = match a.grid.as_str() {
                "linear" => GridKind::Linear,
                "log" => GridKind::Log,
                g => return Err(ExperimentError::Config(format!("unknown grid '{g}' (linear, log)"))),
            };
            Axis::new(AxisName::parse(&a.name)?, grid, a.min, a.max, a.count)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let reduction = match raw.reduction.as_str() {
        "latetime_purity" => Reduction::LatetimePurity,
        "slope" => Reduction::Slope,
        "threshold" => Reduction::Threshold {
            criterion: raw.criterion.unwrap_or(0.01),
        },
        r => {
            return Err(ExperimentError::Config(format!(
                "unknown reduction '{r}' (latetime_purity, threshold, slope)"
            )))
        }
    };
    if raw.criterion.is_some() && !matches!(reduction, Reduction::Threshold { .. }) {
        return Err(ExperimentError::Config(
            "'criterion' only applies to the threshold reduction".into(),
        ));
    }
    if raw.threads == Some(0) {
        return Err(ExperimentError::Config("threads must be positive".into()));
    }
    let spec = SweepSpec {
        base: raw.base.params()?,
        integrator: raw.base.integrator()?,
        reduction,
        axes,
        threads: raw.threads,
        out_dir: raw.output.dir.clone().unwrap_or_else(|| raw.base.out_dir()),
    };
    spec.check_axes()?;
    Ok(spec)
}

impl SweepSpec {
    fn axis(&self, name: AxisName) -> Option<&Axis> {
        self.axes.iter().find(|a| a.name == name)
    }

    fn check_axes(&self) -> Result<(), ExperimentError> {
        let bad = |m: &str| Err(ExperimentError::Config(m.into()));
        if self.axes.is_empty() {
            return bad("a sweep needs at least one axis");
        }
        for (i, a) in self.axes.iter().enumerate() {
            if self.axes[..i].iter().any(|b| b.name == a.name) {
                return bad("duplicate sweep axis");
            }
        }
        match self.reduction {
            Reduction::LatetimePurity => Ok(()),
            Reduction::Slope => match self.axes.as_slice() {
                [a] if a.name == AxisName::TauOverT0 && a.count >= 2 => Ok(()),
                [a] if a.name == AxisName::TauOverT0 => bad("the slope reduction needs at least two grid points"),
                _ => bad("the slope reduction takes exactly one axis, tau_over_t0"),
            },
            Reduction::Threshold { criterion } => {
                if !(criterion > 0.0 && criterion < 1.0) {
                    return bad("criterion must lie in (0, 1)");
                }
                if self.axes.len() != 2
                    || self.axis(AxisName::TauOverT0).is_none()
                    || self.axis(AxisName::TOmega).is_none()
                {
                    return bad("the threshold reduction takes the axes tau_over_t0 and T_omega");
                }
                Ok(())
            }
        }
    }
}

/// Runs the sweep, writes `sweep.csv` and returns the summary.
pub fn run_sweep(spec: &SweepSpec) -> Result<Value, ExperimentError> {
    spec.check_axes()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.threads.unwrap_or(0))
        .build()
        .map_err(|e| ExperimentError::Config(e.to_string()))?;
    pool.install(|| run_reduction(spec))
}

fn run_reduction(spec: &SweepSpec) -> Result<Value, ExperimentError> {
    let mut w = create(&spec.out_dir, "sweep.csv")?;
    let result = match spec.reduction {
        Reduction::LatetimePurity => {
            let grids: Vec<Vec<f64>> = spec.axes.iter().map(Axis::values).collect();
            let cells = cartesian(&grids);
            let values = cells
                .par_iter()
                .map(|c| {
                    let p = spec
                        .axes
                        .iter()
                        .zip(c)
                        .fold(spec.base, |p, (a, &v)| a.name.apply(&p, v));
                    p.validate()?;
                    Ok(latetime_purity(&p, &spec.integrator)?)
                })
                .collect::<Result<Vec<f64>, ExperimentError>>()?;
            let names: Vec<&str> = spec.axes.iter().map(|a| a.name.name()).collect();
            writeln!(w, "{},gamma_inf", names.join(","))?;
            for (c, g) in cells.iter().zip(&values) {
                let cols: Vec<String> = c.iter().map(|v| format!("{v:.16e}")).collect();
                writeln!(w, "{},{g:.16e}", cols.join(","))?;
            }
            json!({
                "cells": values.len(),
                "gamma_inf_min": values.iter().copied().fold(f64::INFINITY, f64::min),
                "gamma_inf_max": values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            })
        }
        Reduction::Slope => {
            let grid = spec.axes[0].values();
            let pts = nonanalyticity_slope(&spec.base, &grid, &spec.integrator)?;
            writeln!(w, "tau_over_t0,one_minus_gamma,rel_uncertainty,slope,resolved")?;
            for q in &pts {
                let s = q.slope.map_or_else(|| "nan".to_string(), |s| format!("{s:.16e}"));
                writeln!(
                    w,
                    "{:.16e},{:.16e},{:.6e},{s},{}",
                    q.tau_over_t0, q.one_minus_gamma, q.rel_uncertainty, q.resolved as u8
                )?;
            }
            let slopes: Vec<f64> = pts.iter().filter_map(|q| q.slope).collect();
            json!({
                "points": pts.len(),
                "resolved": pts.iter().filter(|q| q.resolved).count(),
                "slopes": slopes,
                "strictly_increasing": slopes.windows(2).all(|s| s[1] > s[0]),
            })
        }
        Reduction::Threshold { criterion } => {
            let r = spec.axis(AxisName::TauOverT0).unwrap().values();
            let t = spec.axis(AxisName::TOmega).unwrap().values();
            let scan = recoherence_threshold_scan(&spec.base, &r, &t, criterion, &spec.integrator)?;
            write_scan_csv(&mut w, &scan)?;
            json!({
                "criterion": criterion,
                "slope": scan.slope,
                "intercept": scan.intercept,
                "r_squared": scan.r_squared,
                "thresholds": scan.points.iter().map(|q| [q.tau_over_t0, q.t_omega_thr]).collect::<Vec<_>>(),
            })
        }
    };
    w.flush()?;
    Ok(json!({
        "schema": SCHEMA,
        "base": params_json(&spec.base),
        "axes": spec.axes.iter().map(|a| a.name.name()).collect::<Vec<_>>(),
        "result": result,
    }))
}

/// Row-major product of the axis grids (last axis fastest).
fn cartesian(grids: &[Vec<f64>]) -> Vec<Vec<f64>> {
    grids.iter().fold(vec![Vec::new()], |acc, g| {
        acc.iter()
            .flat_map(|prefix| {
                g.iter().map(move |&v| {
                    let mut c = prefix.clone();
                    c.push(v);
                    c
                })
            })
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "[base]\nomega_s = 1.0\nomega_e = 2.0\npsi = 0.9\nt0 = 1.0\ntau = 5.0\n";

    #[test]
    fn grids() {
        let a = Axis::new(AxisName::Tau, GridKind::Log, 1.0, 100.0, 3).unwrap();
        let v = a.values();
        assert!((v[1] - 10.0).abs() < 1e-12 && v[2] == 100.0);
        let l = Axis::new(AxisName::Psi, GridKind::Linear, 0.1, 0.5, 5).unwrap();
        assert!((l.values()[2] - 0.3).abs() < 1e-15);
        assert!(Axis::new(AxisName::Psi, GridKind::Log, 0.0, 1.0, 3).is_err());
        assert!(Axis::new(AxisName::Psi, GridKind::Linear, 2.0, 1.0, 3).is_err());
        assert!(Axis::new(AxisName::Psi, GridKind::Linear, 1.0, 2.0, 0).is_err());
        assert_eq!(cartesian(&[vec![1.0, 2.0], vec![3.0, 4.0]]).len(), 4);
    }

    #[test]
    fn axes_move_parameters() {
        let p = ScenarioParams::smooth(1.0, 2.0, 0.9, 1.0, 5.0).unwrap();
        let q = AxisName::TOmega.apply(&p, 0.5);
        assert!((q.omega_e - 3.0).abs() < 1e-15 && (q.psi() - 0.9).abs() < 1e-15);
        assert_eq!(AxisName::TauOverT0.apply(&p.with_tau(1.0), 7.0).tau, 7.0);
        assert!((AxisName::Psi.apply(&p, 0.5).xi0 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn one_point_slope_is_rejected() {
        let text = format!(
            "reduction = \"slope\"\n{BASE}[[axis]]\nname = \"tau_over_t0\"\ngrid = \"log\"\nmin = 4.0\nmax = 4.0\ncount = 1\n"
        );
        assert!(matches!(parse_sweep(&text), Err(ExperimentError::Config(_))));
    }

    #[test]
    fn spec_errors() {
        let axis = "[[axis]]\nname = \"psi\"\ngrid = \"linear\"\nmin = 0.1\nmax = 0.5\ncount = 3\n";
        assert!(parse_sweep(&format!("reduction = \"latetime_purity\"\n{BASE}{axis}")).is_ok());
        for bad in [
            format!("reduction = \"mean\"\n{BASE}{axis}"),
            format!("reduction = \"latetime_purity\"\ncriterion = 0.1\n{BASE}{axis}"),
            format!("reduction = \"latetime_purity\"\n{BASE}{axis}{axis}"),
            format!("reduction = \"threshold\"\n{BASE}{axis}"),
            format!("reduction = \"latetime_purity\"\n{BASE}"),
            format!("reduction = \"latetime_purity\"\nthreads = 0\n{BASE}{axis}"),
            format!(
                "reduction = \"latetime_purity\"\n{BASE}{}",
                axis.replace("psi", "colour")
            ),
        ] {
            assert!(matches!(parse_sweep(&bad), Err(ExperimentError::Config(_))), "{bad}");
        }
    }
}
