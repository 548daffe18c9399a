//! Parameter sets of the published figures, addressed by name.

use std::io::Write;
use std::path::Path;

use cho_adiabatic::{nlo_series, nonanalyticity_slope, recoherence_threshold_scan, write_scan_csv, AdiabaticConfig};
use cho_isoso::{regime_purity, ExpansionCase, IsosoSolution};
use cho_markov::MarkovSurrogate;
use cho_model::{coupling_xi, AdiabaticFrame, Regime, ScenarioParams};
use cho_perturbation::purity_o2_isoso;
use cho_transport::{integrate, isoso_reference_params, IntegratorConfig, Trajectory};
use serde_json::{json, Value};

use crate::analysis::{self, create, derived_json, params_json, SCHEMA};
use crate::ExperimentError;

pub const PRESET_NAMES: [&str; 15] = [
    "fig2", "fig3", "fig5", "fig6", "fig7", "fig8L", "fig8R", "fig9", "fig10", "fig11", "fig12", "fig13", "fig14a",
    "fig14b", "fig14c",
];

#[derive(Debug, Clone, PartialEq)]
pub enum PresetJob {
    /// Exact trajectories, with a decay-rate fit for supercritical runs.
    Purity,
    /// Closed-form top-hat purity against `τ = 10⁻⁴t₀` integration.
    IsosoCompare,
    /// Regime expansions against the exact top-hat purity; one scenario per
    /// regime, labelled by its name.
    Expansions,
    Adiabatic {
        order: u8,
    },
    /// `Ĩ_ω` vs `Ĩ_θ` over the interaction region.
    Contributions,
    /// Second-order closed form against the exact top-hat evolution.
    Perturbative,
    LateTimeSlope {
        tau_over_t0: Vec<f64>,
    },
    Threshold {
        tau_over_t0: Vec<f64>,
        t_omega: Vec<f64>,
        criterion: f64,
    },
    Markov,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub caption: &'static str,
    pub scenarios: Vec<(String, ScenarioParams)>,
    pub cfg: IntegratorConfig,
    pub job: PresetJob,
}

fn smooth(we: f64, psi: f64, t0: f64, tau: f64) -> ScenarioParams {
    ScenarioParams::smooth(1.0, we, psi, t0, tau).expect("preset parameters are valid")
}

fn isoso(we: f64, psi: f64, t0: f64) -> ScenarioParams {
    ScenarioParams::isoso(1.0, we, psi, t0).expect("preset parameters are valid")
}

fn psi_label(psi: f64) -> String {
    format!("psi{psi}")
}

fn labelled_regime(r: Regime) -> (String, ScenarioParams) {
    let (w, psi) = r.labelled_point();
    (r.name().to_string(), isoso(1.0 / w, psi, r.labelled_t0()))
}

fn tight() -> IntegratorConfig {
    IntegratorConfig {
        rtol: 1e-12,
        atol: 1e-14,
        ..Default::default()
    }
}

pub fn preset(name: &str) -> Option<Preset> {
    let purity_set = |psis: &[f64]| -> Vec<(String, ScenarioParams)> {
        psis.iter()
            .map(|&psi| (psi_label(psi), smooth(2.0, psi, 10.0, 1.0)))
            .collect()
    };
    let (caption, scenarios, cfg, job) = match name {
        "fig2" => (
            "purity for several couplings across ξ_c; ω_S=1, ω_E=2, τ=1, t₀=10",
            purity_set(&[0.5, 0.9, 1.1, 1.5, 2.0]),
            IntegratorConfig::default(),
            PresetJob::Purity,
        ),
        "fig3" => (
            "supercritical and subcritical purity; ω_S=1, ω_E=2, τ=1, t₀=10",
            purity_set(&[0.1, 0.5, 0.9, 1.1, 1.5, 2.0]),
            IntegratorConfig::default(),
            PresetJob::Purity,
        ),
        "fig11" => (
            "purity for several ω_E/ω_S at ξ₀ = 1.1ξ_c and 0.1ξ_c; τ=1, t₀=10",
            [1.1, 0.1]
                .iter()
                .flat_map(|&psi| {
                    [1.1, 2.0, 5.0, 10.0]
                        .iter()
                        .map(move |&we| (format!("{}_we{we}", psi_label(psi)), smooth(we, psi, 10.0, 1.0)))
                })
                .collect(),
            IntegratorConfig::default(),
            PresetJob::Purity,
        ),
        "fig5" => (
            "closed-form top-hat purity vs τ = 10⁻⁴t₀ integration; ω_S=1, ω_E=2, t₀=10",
            [1.1, 0.9]
                .iter()
                .map(|&psi| (psi_label(psi), isoso(2.0, psi, 10.0)))
                .collect(),
            IntegratorConfig::default(),
            PresetJob::IsosoCompare,
        ),
        "fig6" => (
            "U1, U2a, U2b expansions at their labelled points",
            [Regime::U1, Regime::U2a, Regime::U2b]
                .into_iter()
                .map(labelled_regime)
                .collect(),
            IntegratorConfig::default(),
            PresetJob::Expansions,
        ),
        "fig7" => (
            "C1±, C2±, O1a, O1b, O2 expansions at their labelled points",
            [
                Regime::C1Plus,
                Regime::C1Minus,
                Regime::C2Plus,
                Regime::C2Minus,
                Regime::O1a,
                Regime::O1b,
                Regime::O2,
            ]
            .into_iter()
            .map(labelled_regime)
            .collect(),
            IntegratorConfig::default(),
            PresetJob::Expansions,
        ),
        "fig8L" => (
            "adiabatic leading order; ω_S=1, ω_E=2, ξ₀=0.9ξ_c, t₀=1, τ=50",
            vec![("tau50".into(), smooth(2.0, 0.9, 1.0, 50.0))],
            IntegratorConfig::default(),
            PresetJob::Adiabatic { order: 0 },
        ),
        "fig8R" => (
            "adiabatic next-to-leading order; ω_S=1, ω_E=2, ξ₀=0.9ξ_c, t₀=1, τ=10",
            vec![("tau10".into(), smooth(2.0, 0.9, 1.0, 10.0))],
            IntegratorConfig::default(),
            PresetJob::Adiabatic { order: 1 },
        ),
        "fig9" => (
            "particle creation vs basis rotation; ω_S=1, ω_E=2, ξ₀=0.9ξ_c, t₀=1, τ=10",
            vec![("tau10".into(), smooth(2.0, 0.9, 1.0, 10.0))],
            IntegratorConfig::default(),
            PresetJob::Contributions,
        ),
        "fig10" => (
            "second-order purity vs exact: O1a′ (ω_E=1000, 7ξ_c, t₀=0.1) and C1+′ (ω_E=100, 1.1ξ_c, t₀=0.5)",
            vec![
                ("O1a_prime".into(), isoso(1000.0, 7.0, 0.1)),
                ("C1plus_prime".into(), isoso(100.0, 1.1, 0.5)),
            ],
            tight(),
            PresetJob::Perturbative,
        ),
        "fig12" => (
            "late-time purity loss vs τ/t₀; ω_S=1, ω_E=2, t₀=1, ξ₀=0.9ξ_c",
            vec![("base".into(), smooth(2.0, 0.9, 1.0, 4.0))],
            IntegratorConfig {
                rtol: 1e-12,
                atol: 1e-15,
                ..Default::default()
            },
            PresetJob::LateTimeSlope {
                tau_over_t0: (0..=8).map(|k| 4.0 * 5f64.powf(k as f64 / 8.0)).collect(),
            },
        ),
        "fig13" => (
            "recoherence threshold T_ω^thr vs τ/t₀; ω_S=1, t₀=1, ξ₀=0.9ξ_c",
            vec![("base".into(), smooth(2.0, 0.9, 1.0, 1.0))],
            IntegratorConfig::default(),
            PresetJob::Threshold {
                tau_over_t0: (0..=8).map(|k| 10f64.powf(k as f64 / 8.0)).collect(),
                t_omega: (0..19).map(|k| 0.05 * 10f64.powf(k as f64 / 6.0)).collect(),
                criterion: 0.01,
            },
        ),
        "fig14a" => (
            "Bures velocity, subcritical: ω_E=10, ξ₀=0.5ξ_c, τ=0.01, t₀=1",
            vec![("A".into(), smooth(10.0, 0.5, 1.0, 0.01))],
            tight(),
            PresetJob::Markov,
        ),
        "fig14b" => (
            "Bures velocity, supercritical decohering: ω_E=2, ξ₀=1.1ξ_c, τ=1, t₀=5",
            vec![("B".into(), smooth(2.0, 1.1, 5.0, 1.0))],
            tight(),
            PresetJob::Markov,
        ),
        "fig14c" => (
            "Bures velocity, supercritical recohering: ω_E=10, ξ₀=1.1ξ_c, τ=1, t₀=5",
            vec![("C".into(), smooth(10.0, 1.1, 5.0, 1.0))],
            tight(),
            PresetJob::Markov,
        ),
        _ => return None,
    };
    let name = PRESET_NAMES.into_iter().find(|n| *n == name)?;
    Some(Preset {
        name,
        caption,
        scenarios,
        cfg,
        job,
    })
}

impl Preset {
    /// Every exact trajectory the preset integrates, as `(label, params)`.
    /// Top-hat scenarios are integrated through their `τ = 10⁻⁴t₀`
    /// stand-in, except in the perturbative comparison, which integrates
    /// the top-hat piecewise.
    pub fn trajectories(&self) -> Vec<(String, ScenarioParams)> {
        match &self.job {
            PresetJob::IsosoCompare | PresetJob::Expansions => self
                .scenarios
                .iter()
                .map(|(l, p)| (l.clone(), isoso_reference_params(p)))
                .collect(),
            PresetJob::LateTimeSlope { tau_over_t0 } => {
                let base = self.scenarios[0].1;
                tau_over_t0
                    .iter()
                    .map(|&r| (format!("tau_over_t0_{r:.4}"), base.with_tau(r * base.t0)))
                    .collect()
            }
            PresetJob::Threshold {
                tau_over_t0, t_omega, ..
            } => {
                let base = self.scenarios[0].1;
                let (r0, r1) = (tau_over_t0[0], *tau_over_t0.last().unwrap());
                let (w0, w1) = (t_omega[0], *t_omega.last().unwrap());
                [(r0, w0), (r0, w1), (r1, w0), (r1, w1)]
                    .iter()
                    .map(|&(r, tw)| {
                        let p = base
                            .with_tau(r * base.t0)
                            .with_omega_e_fixed_psi(base.omega_s * (1.0 + 1.0 / tw));
                        (format!("tau_over_t0_{r:.3}_T_{tw:.3}"), p)
                    })
                    .collect()
            }
            _ => self.scenarios.clone(),
        }
    }
}

/// Least-squares slope of `ln γ` over `[t_a, t_b]`.
pub fn log_purity_slope(traj: &Trajectory, t_a: f64, t_b: f64) -> f64 {
    let pts: Vec<(f64, f64)> = traj
        .times()
        .zip(&traj.purity_s)
        .filter(|(t, _)| *t >= t_a && *t <= t_b)
        .map(|(t, g)| (t, g.ln()))
        .collect();
    let n = pts.len() as f64;
    let (mx, my) = (
        pts.iter().map(|p| p.0).sum::<f64>() / n,
        pts.iter().map(|p| p.1).sum::<f64>() / n,
    );
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// `|ω₁|` at full coupling.
pub fn abs_omega1(p: &ScenarioParams) -> f64 {
    AdiabaticFrame::from_coupling(p.omega_s, p.omega_e, p.xi0, 0.0)
        .map(|f| f.omega1_abs)
        .unwrap_or(f64::NAN)
}

/// Largest relative error of an expansion against the closed-form top-hat
/// purity over `Δt ∈ [0, 2t₀]`, sampled at `n + 1` points.
pub fn expansion_max_rel_error(case: ExpansionCase, p: &ScenarioParams, n: usize) -> Result<f64, ExperimentError> {
    let sol = IsosoSolution::new(p)?;
    let mut worst: f64 = 0.0;
    for k in 0..=n {
        let dt = 2.0 * p.t0 * k as f64 / n as f64;
        let g = sol.purity(dt - p.t0)?;
        let e = regime_purity(case, dt, p)?;
        worst = worst.max(((e - g) / g).abs());
    }
    Ok(worst)
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Runs a preset into `out/<name>/` and returns its JSON summary.
pub fn run_preset(name: &str, out: &Path) -> Result<Value, ExperimentError> {
    let pr = preset(name).ok_or_else(|| {
        ExperimentError::Config(format!("unknown preset '{name}' (one of {})", PRESET_NAMES.join(", ")))
    })?;
    let dir = out.join(pr.name);
    let cfg = &pr.cfg;
    let mut results = Vec::new();
    match &pr.job {
        PresetJob::Purity => {
            for (label, p) in &pr.scenarios {
                let traj = integrate(p, cfg)?;
                traj.write_csv(create(&dir, &format!("trajectory_{label}.csv"))?)?;
                let (t_min, g_min) = traj.min_purity();
                let fit = p.is_supercritical().then(|| {
                    let slope = log_purity_slope(&traj, 0.0, p.t0);
                    json!({ "window": [0.0, p.t0], "slope": slope, "abs_omega1": abs_omega1(p) })
                });
                results.push(json!({
                    "label": label, "params": params_json(p), "derived": derived_json(p),
                    "gamma_min": g_min, "t_gamma_min": t_min, "gamma_end": traj.final_purity(),
                    "decay_fit": fit,
                }));
            }
        }
        PresetJob::IsosoCompare => {
            for (label, p) in &pr.scenarios {
                let sol = IsosoSolution::new(p)?;
                let traj = integrate(&isoso_reference_params(p), cfg)?;
                let mut w = create(&dir, &format!("isoso_compare_{label}.csv"))?;
                writeln!(w, "t,purity_analytic,purity_numeric")?;
                let mut gap: f64 = 0.0;
                for (t, g) in traj.times().zip(&traj.purity_s) {
                    let a = sol.purity(t)?;
                    if t.abs() <= p.t0 {
                        gap = gap.max((a - g).abs());
                    }
                    writeln!(w, "{},{},{}", fmt(t), fmt(a), fmt(*g))?;
                }
                w.flush()?;
                results.push(json!({ "label": label, "params": params_json(p), "max_gap": gap }));
            }
        }
        PresetJob::Expansions => {
            for (label, p) in &pr.scenarios {
                let case = ExpansionCase::of(Regime::from_name(label).expect("labelled by regime"));
                let sol = IsosoSolution::new(p)?;
                let traj = integrate(&isoso_reference_params(p), cfg)?;
                let mut w = create(
                    &dir,
                    &format!("expansion_{}.csv", label.replace('+', "plus").replace('-', "minus")),
                )?;
                writeln!(w, "t,dt,purity_analytic,purity_expansion,purity_numeric")?;
                for (t, g) in traj.times().zip(&traj.purity_s) {
                    let dt = (t.min(p.t0) + p.t0).max(0.0);
                    let e = regime_purity(case, dt, p)?;
                    writeln!(
                        w,
                        "{},{},{},{},{}",
                        fmt(t),
                        fmt(dt),
                        fmt(sol.purity(t)?),
                        fmt(e),
                        fmt(*g)
                    )?;
                }
                w.flush()?;
                results.push(json!({
                    "label": label, "params": params_json(p), "derived": derived_json(p),
                    "max_rel_error": expansion_max_rel_error(case, p, 2000)?,
                }));
            }
        }
        PresetJob::Adiabatic { order } => {
            for (_, p) in &pr.scenarios {
                results.push(analysis::adiabatic(p, cfg, *order, &dir)?);
            }
        }
        PresetJob::Contributions => {
            for (label, p) in &pr.scenarios {
                let traj = integrate(p, cfg)?;
                let times: Vec<f64> = traj.times().collect();
                let nlo = nlo_series(p, &times, &AdiabaticConfig::default())?;
                let mut w = create(&dir, "contributions.csv")?;
                writeln!(w, "t,itilde_omega,itilde_theta")?;
                let (mut inside, mut dominant) = (0usize, 0usize);
                for n in &nlo {
                    writeln!(w, "{},{},{}", fmt(n.t), fmt(n.itilde_omega), fmt(n.itilde_theta))?;
                    if coupling_xi(n.t, p) >= 0.5 * p.xi0 {
                        inside += 1;
                        dominant += (n.itilde_omega.abs() > n.itilde_theta.abs()) as usize;
                    }
                }
                w.flush()?;
                results.push(json!({
                    "label": label, "params": params_json(p),
                    "fwhm_samples": inside, "dominance_fraction": dominant as f64 / inside.max(1) as f64,
                }));
            }
        }
        PresetJob::Perturbative => {
            for (label, p) in &pr.scenarios {
                let traj = integrate(p, cfg)?;
                let mut w = create(&dir, &format!("perturbative_{label}.csv"))?;
                writeln!(w, "t,purity_exact,purity_o2")?;
                let mut gap: f64 = 0.0;
                for (t, g) in traj.times().zip(&traj.purity_s) {
                    let o2 = purity_o2_isoso((t.min(p.t0) + p.t0).max(0.0), p);
                    gap = gap.max((o2 - g).abs());
                    writeln!(w, "{},{},{}", fmt(t), fmt(*g), fmt(o2))?;
                }
                w.flush()?;
                results.push(json!({
                    "label": label, "params": params_json(p), "derived": derived_json(p), "max_gap": gap,
                }));
            }
        }
        PresetJob::LateTimeSlope { tau_over_t0 } => {
            let p = &pr.scenarios[0].1;
            let pts = nonanalyticity_slope(p, tau_over_t0, cfg)?;
            let mut w = create(&dir, "latetime_slope.csv")?;
            writeln!(w, "tau_over_t0,one_minus_gamma,rel_uncertainty,slope,resolved")?;
            for q in &pts {
                let s = q.slope.map_or_else(|| "nan".into(), fmt);
                writeln!(
                    w,
                    "{},{},{:.6e},{s},{}",
                    fmt(q.tau_over_t0),
                    fmt(q.one_minus_gamma),
                    q.rel_uncertainty,
                    q.resolved as u8
                )?;
            }
            w.flush()?;
            let slopes: Vec<f64> = pts.iter().filter_map(|q| q.slope).collect();
            results.push(json!({
                "params": params_json(p),
                "slopes": slopes,
                "all_resolved": pts.iter().all(|q| q.resolved),
                "strictly_increasing": slopes.windows(2).all(|s| s[1] > s[0]),
            }));
        }
        PresetJob::Threshold {
            tau_over_t0,
            t_omega,
            criterion,
        } => {
            let p = &pr.scenarios[0].1;
            let scan = recoherence_threshold_scan(p, tau_over_t0, t_omega, *criterion, cfg)?;
            let mut w = create(&dir, "threshold.csv")?;
            write_scan_csv(&mut w, &scan)?;
            w.flush()?;
            results.push(json!({
                "params": params_json(p), "criterion": criterion,
                "slope": scan.slope, "intercept": scan.intercept, "r_squared": scan.r_squared,
            }));
        }
        PresetJob::Markov => {
            for (_, p) in &pr.scenarios {
                for s in MarkovSurrogate::ALL {
                    results.push(analysis::markov(p, cfg, s, &dir)?);
                }
            }
        }
    }
    Ok(json!({
        "schema": SCHEMA,
        "preset": pr.name,
        "caption": pr.caption,
        "results": results,
    }))
}
