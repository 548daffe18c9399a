use std::io::Write;

use cho_model::{classify_regime, perturbativity_gp_wpsi, RegimeThresholds};
use serde_json::{json, Value};

use crate::analysis::{create, SCHEMA};
use crate::ExperimentError;

/// `|ψ − 1|` within which a cell is reported as near-critical.
pub const NEAR_CRITICAL: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseCell {
    pub w: f64,
    pub psi: f64,
    pub regime: &'static str,
    pub g_p: f64,
    pub criticality: &'static str,
    pub perturbative: bool,
}

pub fn criticality(psi: f64) -> &'static str {
    if (psi - 1.0).abs() <= NEAR_CRITICAL {
        "near-critical"
    } else if psi > 1.0 {
        "supercritical"
    } else {
        "subcritical"
    }
}

/// Parses `a:b:n` (linear) or `a:b:n:log`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, ExperimentError> {
    let bad = || ExperimentError::Config(format!("grid '{s}' is not a:b:n[:log]"));
    let parts: Vec<&str> = s.split(':').collect();
    let (log, parts) = match parts.as_slice() {
        [a, b, n] => (false, [*a, *b, *n]),
        [a, b, n, "log"] => (true, [*a, *b, *n]),
        [a, b, n, "linear"] => (false, [*a, *b, *n]),
        _ => return Err(bad()),
    };
    let a: f64 = parts[0].parse().map_err(|_| bad())?;
    let b: f64 = parts[1].parse().map_err(|_| bad())?;
    let n: usize = parts[2].parse().map_err(|_| bad())?;
    let grid = if log {
        crate::sweep::GridKind::Log
    } else {
        crate::sweep::GridKind::Linear
    };
    Ok(crate::sweep::Axis::new(crate::sweep::AxisName::Psi, grid, a, b, n)?.values())
}

pub fn classify_grid(w_grid: &[f64], psi_grid: &[f64]) -> Result<Vec<PhaseCell>, ExperimentError> {
    let thr = RegimeThresholds::default();
    for &w in w_grid {
        if !(w > 0.0 && w <= 1.0) {
            return Err(ExperimentError::Config(format!(
                "w = {w} outside (0, 1]; swap system and environment"
            )));
        }
    }
    for &psi in psi_grid {
        if !(psi > 0.0 && psi <= 100.0) {
            return Err(ExperimentError::Config(format!("psi = {psi} outside (0, 100]")));
        }
    }
    let mut cells = Vec::with_capacity(w_grid.len() * psi_grid.len());
    for &w in w_grid {
        for &psi in psi_grid {
            let label = classify_regime(w, psi, &thr)?;
            cells.push(PhaseCell {
                w,
                psi,
                regime: label.regime.name(),
                g_p: perturbativity_gp_wpsi(w, psi),
                criticality: criticality(psi),
                perturbative: label.perturbative,
            });
        }
    }
    Ok(cells)
}

/// `ψ` on the `g_p = 0.1` contour at each `w`.
pub fn perturbativity_contour(w: f64) -> f64 {
    0.1 / perturbativity_gp_wpsi(w, 1.0)
}

/// Writes `phase_diagram.csv`: one `cell` row per grid point, then the
/// `ψ = 1` and `g_p = 0.1` contour points at each `w`.
pub fn phase_diagram(w_grid: &[f64], psi_grid: &[f64], out: &std::path::Path) -> Result<Value, ExperimentError> {
    let cells = classify_grid(w_grid, psi_grid)?;
    let mut f = create(out, "phase_diagram.csv")?;
    writeln!(f, "kind,w,psi,regime,g_p,criticality,perturbative")?;
    for c in &cells {
        writeln!(
            f,
            "cell,{:.16e},{:.16e},{},{:.16e},{},{}",
            c.w, c.psi, c.regime, c.g_p, c.criticality, c.perturbative as u8
        )?;
    }
    for &w in w_grid {
        writeln!(
            f,
            "critical,{w:.16e},{:.16e},,{:.16e},near-critical,",
            1.0,
            perturbativity_gp_wpsi(w, 1.0)
        )?;
        let psi = perturbativity_contour(w);
        writeln!(
            f,
            "perturbative,{w:.16e},{psi:.16e},,{:.16e},{},",
            0.1,
            criticality(psi)
        )?;
    }
    f.flush()?;
    let mut counts = std::collections::BTreeMap::new();
    for c in &cells {
        *counts.entry(c.regime).or_insert(0usize) += 1;
    }
    Ok(json!({ "schema": SCHEMA, "cells": cells.len(), "regime_counts": counts }))
}
