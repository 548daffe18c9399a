use std::io::{self, Write};

use cho_model::ScenarioParams;
use cho_transport::{integrate, IntegratorConfig, Trajectory};

use crate::bures::{bures_velocity, bures_velocity_fd};
use crate::maps::{cp_check, infinitesimal_pair, NoiseSource};
use crate::noise::{gamma_dot, noise_b_xi, surrogate_b, MarkovSurrogate};
use crate::MarkovError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkovSample {
    pub t: f64,
    pub purity: f64,
    pub xi: f64,
    pub lambda_minus: f64,
    pub lambda_plus: f64,
    pub gamma_dot: f64,
    /// Closed-form velocity; `None` at (numerically) pure states.
    pub v_bures: Option<f64>,
    pub v_bures_fd: Option<f64>,
    /// Surrogate in force after the best-decohering fallback.
    pub surrogate: MarkovSurrogate,
    /// Whether the exact infinitesimal map is completely positive.
    pub cp_exact: bool,
}

/// Markov diagnostics along a trajectory.
pub fn analyze_trajectory(traj: &Trajectory, surrogate: MarkovSurrogate) -> Result<Vec<MarkovSample>, MarkovError> {
    let p = &traj.params;
    let dt = 1e-6 * 2.0 * std::f64::consts::PI / p.omega2_max();
    traj.samples
        .iter()
        .zip(&traj.purity_s)
        .zip(&traj.xi)
        .map(|((st, &purity), &xi)| {
            let noise = noise_b_xi(st, xi);
            let used = surrogate_b(surrogate, &st.system_block(), st.det_s, &noise).1;
            let v = match bures_velocity(st, xi, surrogate) {
                Ok((v, _)) => Some(v),
                Err(MarkovError::PureStateSingularity) => None,
                Err(e) => return Err(e),
            };
            let v_fd = if purity < 1.0 - crate::EPS_PURE {
                Some(bures_velocity_fd(st, xi, p, surrogate)?)
            } else {
                None
            };
            let cp = cp_check(&infinitesimal_pair(st, p, xi, NoiseSource::Exact, dt));
            Ok(MarkovSample {
                t: st.t,
                purity,
                xi,
                lambda_minus: noise.lambda_minus,
                lambda_plus: noise.lambda_plus,
                gamma_dot: gamma_dot(&st.system_block(), st.det_s, &noise.b),
                v_bures: v,
                v_bures_fd: v_fd,
                surrogate: used,
                cp_exact: cp.completely_positive,
            })
        })
        .collect()
}

pub fn analyze(
    p: &ScenarioParams,
    cfg: &IntegratorConfig,
    surrogate: MarkovSurrogate,
) -> Result<Vec<MarkovSample>, MarkovError> {
    analyze_trajectory(&integrate(p, cfg)?, surrogate)
}

/// Samples where the coupling is on and `σ_SE,11` is not negligible, yet
/// `det B` fails to be strictly negative.
pub fn non_markovian_violations(traj: &Trajectory) -> usize {
    traj.samples
        .iter()
        .zip(&traj.xi)
        .filter(|(st, &xi)| xi > 0.0 && st.sigma.0[0][2].abs() > 1e-10 && !(noise_b_xi(st, xi).b.det() < 0.0))
        .count()
}

pub fn write_csv<W: Write>(mut w: W, samples: &[MarkovSample]) -> io::Result<()> {
    writeln!(
        w,
        "t,purity,lambda_minus,lambda_plus,v_bures,v_bures_fd,surrogate,cp_flag"
    )?;
    let opt = |v: Option<f64>| v.map_or_else(|| "nan".to_string(), |v| format!("{v:.12e}"));
    for s in samples {
        writeln!(
            w,
            "{:.12e},{:.15e},{:.12e},{:.12e},{},{},{},{}",
            s.t,
            s.purity,
            s.lambda_minus,
            s.lambda_plus,
            opt(s.v_bures),
            opt(s.v_bures_fd),
            s.surrogate.name(),
            s.cp_exact as u8
        )?;
    }
    Ok(())
}
