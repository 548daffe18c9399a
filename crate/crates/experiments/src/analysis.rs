//! Single-scenario runs: each writes its CSV into the output directory and
//! returns a JSON summary.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use cho_adiabatic::{latetime_purity, nlo_series, purity_adiabatic_lo, AdiabaticConfig};
use cho_isoso::{check_case_domain, decoherence_rate, ExpansionCase, IsosoSolution};
use cho_markov::{analyze_trajectory, non_markovian_violations, MarkovSurrogate};
use cho_model::{classify_regime, AdiabaticFrame, Profile, Regime, RegimeThresholds, ScenarioParams};
use cho_perturbation::{purity_o2_isoso, purity_o2_quadrature, QuadratureConfig};
use cho_transport::{integrate, integrate_at, run_summary, sample_times, IntegratorConfig};
use serde_json::{json, Value};

use crate::ExperimentError;

pub const SCHEMA: u32 = 1;

pub(crate) fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, ExperimentError> {
    fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

pub fn params_json(p: &ScenarioParams) -> Value {
    json!({
        "omega_s": p.omega_s,
        "omega_e": p.omega_e,
        "xi0": p.xi0,
        "psi": p.psi(),
        "t0": p.t0,
        "tau": p.tau,
        "profile": p.profile.name(),
    })
}

/// `ξ_c`, `g_p`, `|ω₁|` at full coupling and the regime label (for `w ≤ 1`).
pub fn derived_json(p: &ScenarioParams) -> Value {
    let d = p.derived();
    let regime = classify_regime(d.w, d.psi, &RegimeThresholds::default())
        .ok()
        .map(|l| l.regime.name());
    let abs_omega1 = AdiabaticFrame::from_coupling(p.omega_s, p.omega_e, p.xi0, 0.0)
        .ok()
        .map(|f| f.omega1_abs);
    json!({
        "xi_c": d.xi_c,
        "g_p": d.g_p,
        "w": d.w,
        "regime": regime,
        "abs_omega1": abs_omega1,
    })
}

/// Exact trajectory plus the late-time purity; writes `trajectory.csv`.
pub fn simulate(p: &ScenarioParams, cfg: &IntegratorConfig, out: &Path) -> Result<Value, ExperimentError> {
    let traj = integrate(p, cfg)?;
    traj.write_csv(create(out, "trajectory.csv")?)?;
    let summary = run_summary(p, cfg)?;
    let gamma_inf = latetime_purity(p, cfg)?;
    Ok(json!({
        "schema": SCHEMA,
        "params": params_json(p),
        "derived": derived_json(p),
        "gamma_min": summary.gamma_min,
        "t_gamma_min": summary.t_gamma_min,
        "gamma_end": summary.gamma_end,
        "gamma_inf": gamma_inf,
        "invariants": {
            "max_det_err": summary.max_det_err,
            "max_purity_diff": summary.max_purity_diff,
            "min_nu": summary.min_nu,
        },
        "samples": traj.len(),
    }))
}

fn isoso_params(p: &ScenarioParams) -> ScenarioParams {
    p.with_profile(Profile::IsosoTopHat)
}

pub fn parse_expansion(name: &str) -> Result<ExpansionCase, ExperimentError> {
    Regime::from_name(name)
        .map(ExpansionCase::of)
        .ok_or_else(|| ExperimentError::Config(format!("unknown expansion case '{name}'")))
}

/// Closed-form top-hat purity (and optionally one regime expansion) on the
/// sample grid of the window; writes `isoso.csv`.
pub fn isoso(
    p: &ScenarioParams,
    cfg: &IntegratorConfig,
    expansion: Option<&str>,
    out: &Path,
) -> Result<Value, ExperimentError> {
    let p = isoso_params(p);
    let case = expansion.map(parse_expansion).transpose()?;
    let warning = case.and_then(|c| check_case_domain(c, &p).err()).map(|e| e.to_string());
    let times = sample_times(&p, cfg);
    cho_isoso::write_csv(create(out, "isoso.csv")?, &times, &p, case)?;
    let sol = IsosoSolution::new(&p)?;
    let gamma_min = times
        .iter()
        .map(|&t| sol.purity(t))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    Ok(json!({
        "schema": SCHEMA,
        "params": params_json(&p),
        "derived": derived_json(&p),
        "gamma_min": gamma_min,
        "decoherence_rate": decoherence_rate(&p),
        "expansion": case.map(|c| c.regime.name()),
        "warning": warning,
    }))
}

/// Second-order purity by quadrature on 201 points across the window, with
/// the top-hat closed form alongside; writes `perturbation.csv`.
pub fn perturb(p: &ScenarioParams, cfg: &IntegratorConfig, out: &Path) -> Result<Value, ExperimentError> {
    let q = QuadratureConfig::default();
    let (t_in, t_end) = (p.t_in(), cfg.t_end_for(p));
    let n = 200;
    let times: Vec<f64> = (0..=n).map(|k| t_in + (t_end - t_in) * k as f64 / n as f64).collect();
    let values = times
        .iter()
        .map(|&t| purity_o2_quadrature(t, p, &q))
        .collect::<Result<Vec<_>, _>>()?;
    let exact = integrate_at(p, cfg, &times)?;
    let mut w = create(out, "perturbation.csv")?;
    writeln!(w, "t,purity_o2,purity_o2_closed_form,purity_exact")?;
    let mut max_gap: f64 = 0.0;
    for ((&t, g2), ge) in times.iter().zip(&values).zip(&exact.purity_s) {
        let closed = match p.profile {
            Profile::IsosoTopHat => format!("{:.16e}", purity_o2_isoso((t.min(p.t0) + p.t0).max(0.0), p)),
            Profile::Smooth => "nan".into(),
        };
        max_gap = max_gap.max((g2 - ge).abs());
        writeln!(w, "{t:.16e},{g2:.16e},{closed},{ge:.16e}")?;
    }
    w.flush()?;
    Ok(json!({
        "schema": SCHEMA,
        "params": params_json(p),
        "derived": derived_json(p),
        "min_purity_o2": values.iter().copied().fold(f64::INFINITY, f64::min),
        "max_gap_to_exact": max_gap,
    }))
}

/// Adiabatic purity against the exact run; writes `adiabatic.csv`.
pub fn adiabatic(p: &ScenarioParams, cfg: &IntegratorConfig, order: u8, out: &Path) -> Result<Value, ExperimentError> {
    if order > 1 {
        return Err(ExperimentError::Config("order must be 0 or 1".into()));
    }
    let traj = integrate(p, cfg)?;
    let times: Vec<f64> = traj.times().collect();
    let lo = times
        .iter()
        .map(|&t| purity_adiabatic_lo(t, p))
        .collect::<Result<Vec<_>, _>>()?;
    let nlo = if order == 1 {
        Some(nlo_series(p, &times, &AdiabaticConfig::default())?)
    } else {
        None
    };
    let mut w = create(out, "adiabatic.csv")?;
    match nlo {
        Some(_) => writeln!(
            w,
            "t,purity_exact,purity_lo,purity_nlo,delta_gamma,itilde_omega,itilde_theta"
        )?,
        None => writeln!(w, "t,purity_exact,purity_lo")?,
    }
    let (mut err_lo, mut err_nlo) = (0.0f64, 0.0f64);
    for (k, &t) in times.iter().enumerate() {
        let ge = traj.purity_s[k];
        err_lo = err_lo.max((lo[k] - ge).abs());
        write!(w, "{t:.16e},{ge:.16e},{:.16e}", lo[k])?;
        if let Some(n) = &nlo {
            let n = &n[k];
            err_nlo = err_nlo.max((n.gamma_nlo() - ge).abs());
            write!(
                w,
                ",{:.16e},{:.16e},{:.16e},{:.16e}",
                n.gamma_nlo(),
                n.delta_gamma,
                n.itilde_omega,
                n.itilde_theta
            )?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(json!({
        "schema": SCHEMA,
        "params": params_json(p),
        "derived": derived_json(p),
        "order": order,
        "max_error_lo": err_lo,
        "max_error_nlo": nlo.as_ref().map(|_| err_nlo),
        "gamma_end": traj.final_purity(),
    }))
}

/// Markov diagnostics along the exact trajectory; writes `markov_<surrogate>.csv`.
pub fn markov(
    p: &ScenarioParams,
    cfg: &IntegratorConfig,
    surrogate: MarkovSurrogate,
    out: &Path,
) -> Result<Value, ExperimentError> {
    let traj = integrate(p, cfg)?;
    let samples = analyze_trajectory(&traj, surrogate)?;
    cho_markov::write_csv(create(out, &format!("markov_{}.csv", surrogate.name()))?, &samples)?;
    let v_max = samples.iter().filter_map(|s| s.v_bures).fold(0.0, f64::max);
    let worst_fd = samples
        .iter()
        .filter(|s| s.purity < 0.999)
        .filter_map(|s| match (s.v_bures, s.v_bures_fd) {
            (Some(a), Some(b)) if a > 0.0 => Some((a - b).abs() / a),
            _ => None,
        })
        .fold(0.0, f64::max);
    Ok(json!({
        "schema": SCHEMA,
        "params": params_json(p),
        "derived": derived_json(p),
        "surrogate": surrogate.name(),
        "non_markovian_violations": non_markovian_violations(&traj),
        "cp_exact_failures": samples.iter().filter(|s| s.xi > 0.0 && !s.cp_exact).count(),
        "v_bures_max": v_max,
        "closed_vs_fd_max_rel": worst_fd,
        "samples": samples.len(),
    }))
}
