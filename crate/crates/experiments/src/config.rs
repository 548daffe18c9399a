//! TOML scenario and sweep files. Unknown keys are rejected, and so are
//! duplicate keys (the TOML parser refuses redefinitions).

use std::path::PathBuf;

use cho_markov::MarkovSurrogate;
use cho_model::{Coupling, Profile, ScenarioParams};
use cho_transport::{IntegratorConfig, TEndPolicy};
use serde::Deserialize;

use crate::ExperimentError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawScenario {
    omega_s: f64,
    omega_e: f64,
    xi0: Option<f64>,
    psi: Option<f64>,
    t0: f64,
    tau: Option<f64>,
    profile: Option<String>,
    #[serde(default)]
    integrator: RawIntegrator,
    #[serde(default)]
    analysis: RawAnalysis,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIntegrator {
    rtol: Option<f64>,
    atol: Option<f64>,
    h_min: Option<f64>,
    max_step: Option<f64>,
    sample_dt: Option<f64>,
    t_end: Option<RawTEnd>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RawTEnd {
    At(f64),
    Named(String),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAnalysis {
    #[serde(default)]
    isoso: bool,
    expansion: Option<String>,
    #[serde(default)]
    perturbation: bool,
    adiabatic_order: Option<u8>,
    markov: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawOutput {
    pub(crate) dir: Option<PathBuf>,
}

/// Which analyses `simulate` runs on top of the trajectory.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnalysisSelection {
    pub isoso: bool,
    /// Regime expansion overlaid on the ISOSO output.
    pub expansion: Option<String>,
    pub perturbation: bool,
    pub adiabatic_order: Option<u8>,
    pub markov: Option<MarkovSurrogate>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub params: ScenarioParams,
    pub integrator: IntegratorConfig,
    pub analysis: AnalysisSelection,
    pub out_dir: PathBuf,
}

fn cfg_err(e: impl std::fmt::Display) -> ExperimentError {
    ExperimentError::Config(e.to_string())
}

pub fn parse_surrogate(s: &str) -> Result<MarkovSurrogate, ExperimentError> {
    match s {
        "best" => Ok(MarkovSurrogate::BestDecohering),
        _ => MarkovSurrogate::from_name(s)
            .ok_or_else(|| cfg_err(format!("unknown surrogate '{s}' (drop-negative, best, unitary)"))),
    }
}

impl RawScenario {
    pub(crate) fn params(&self) -> Result<ScenarioParams, ExperimentError> {
        let coupling = match (self.xi0, self.psi) {
            (Some(x), None) => Coupling::Xi0(x),
            (None, Some(p)) => Coupling::Psi(p),
            _ => return Err(cfg_err("exactly one of 'xi0' and 'psi' must be given")),
        };
        let profile = match self.profile.as_deref().unwrap_or("smooth") {
            "smooth" => Profile::Smooth,
            "isoso" => Profile::IsosoTopHat,
            other => return Err(cfg_err(format!("unknown profile '{other}' (smooth, isoso)"))),
        };
        let tau = match (profile, self.tau) {
            (Profile::Smooth, Some(t)) => t,
            (Profile::Smooth, None) => return Err(cfg_err("the smooth profile needs 'tau'")),
            (Profile::IsosoTopHat, t) => t.unwrap_or(0.0),
        };
        Ok(ScenarioParams::new(
            self.omega_s,
            self.omega_e,
            coupling,
            self.t0,
            tau,
            profile,
        )?)
    }

    pub(crate) fn integrator(&self) -> Result<IntegratorConfig, ExperimentError> {
        let r = &self.integrator;
        let d = IntegratorConfig::default();
        let t_end_policy = match &r.t_end {
            None => d.t_end_policy,
            Some(RawTEnd::At(t)) => TEndPolicy::At(*t),
            Some(RawTEnd::Named(s)) if s == "window" => TEndPolicy::FixedWindow,
            Some(RawTEnd::Named(s)) if s == "cutoff" => TEndPolicy::CouplingCutoff(1e-10),
            Some(RawTEnd::Named(s)) => {
                return Err(cfg_err(format!(
                    "t_end must be a time, 'window' or 'cutoff', not '{s}'"
                )))
            }
        };
        let cfg = IntegratorConfig {
            rtol: r.rtol.unwrap_or(d.rtol),
            atol: r.atol.unwrap_or(d.atol),
            h_min: r.h_min.unwrap_or(d.h_min),
            max_step: r.max_step,
            sample_dt: r.sample_dt,
            t_end_policy,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn analysis(&self) -> Result<AnalysisSelection, ExperimentError> {
        let a = &self.analysis;
        if matches!(a.adiabatic_order, Some(o) if o > 1) {
            return Err(cfg_err("adiabatic_order must be 0 or 1"));
        }
        Ok(AnalysisSelection {
            isoso: a.isoso,
            expansion: a.expansion.clone(),
            perturbation: a.perturbation,
            adiabatic_order: a.adiabatic_order,
            markov: a.markov.as_deref().map(parse_surrogate).transpose()?,
        })
    }

    pub(crate) fn out_dir(&self) -> PathBuf {
        self.output.dir.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    pub(crate) fn scenario(&self) -> Result<Scenario, ExperimentError> {
        Ok(Scenario {
            params: self.params()?,
            integrator: self.integrator()?,
            analysis: self.analysis()?,
            out_dir: self.out_dir(),
        })
    }
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ExperimentError> {
    let raw: RawScenario = toml::from_str(text).map_err(cfg_err)?;
    raw.scenario()
}

pub fn load_scenario(path: &std::path::Path) -> Result<Scenario, ExperimentError> {
    let text = std::fs::read_to_string(path).map_err(|e| cfg_err(format!("{}: {e}", path.display())))?;
    parse_scenario(&text)
}
