use std::f64::consts::PI;
use std::io::{self, Write};

use cho_model::{coupling_xi, ModelError, Profile, ScenarioParams};
use cho_symplectic::{Mat4, Sym4, SymplecticError};

use crate::ode::{Dopri5, OdeError, OdeOptions};
use crate::state::{packed_rhs, vacuum_initial, CovarianceState, PACKED};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TEndPolicy {
    /// Mirror of the start time, `t_end = −t_in`.
    FixedWindow,
    /// First `t > 0` at which `ξ(t)/ξ₀` falls below the threshold.
    CouplingCutoff(f64),
    At(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    pub h_min: f64,
    /// Overrides the default cap `min(0.05·2π/ω₂_max, τ/20)`.
    pub max_step: Option<f64>,
    /// Overrides the default cadence `(2π/ω₂_max)/40`.
    pub sample_dt: Option<f64>,
    pub t_end_policy: TEndPolicy,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rtol: 1e-10,
            atol: 1e-12,
            h_min: 1e-12,
            max_step: None,
            sample_dt: None,
            t_end_policy: TEndPolicy::FixedWindow,
        }
    }
}

impl IntegratorConfig {
    pub fn cutoff() -> Self {
        IntegratorConfig {
            t_end_policy: TEndPolicy::CouplingCutoff(1e-10),
            ..Default::default()
        }
    }

    pub fn until(t: f64) -> Self {
        IntegratorConfig {
            t_end_policy: TEndPolicy::At(t),
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), TransportError> {
        let bad = |m: &str| Err(TransportError::InvalidConfig(m.into()));
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return bad("rtol and atol must be positive");
        }
        if !(self.h_min > 0.0) {
            return bad("h_min must be positive");
        }
        if matches!(self.max_step, Some(h) if !(h > 0.0)) {
            return bad("max_step must be positive");
        }
        if matches!(self.sample_dt, Some(h) if !(h > 0.0)) {
            return bad("sample_dt must be positive");
        }
        if matches!(self.t_end_policy, TEndPolicy::CouplingCutoff(c) if !(c > 0.0 && c < 1.0)) {
            return bad("coupling cutoff must lie in (0, 1)");
        }
        Ok(())
    }

    pub fn max_step_for(&self, p: &ScenarioParams) -> f64 {
        self.max_step.unwrap_or_else(|| {
            let cap = 0.05 * 2.0 * PI / p.omega2_max();
            match p.profile {
                Profile::Smooth => cap.min(p.tau / 20.0),
                Profile::IsosoTopHat => cap,
            }
        })
    }

    pub fn sample_dt_for(&self, p: &ScenarioParams) -> f64 {
        self.sample_dt.unwrap_or(2.0 * PI / p.omega2_max() / 40.0)
    }

    pub fn t_end_for(&self, p: &ScenarioParams) -> f64 {
        match self.t_end_policy {
            TEndPolicy::FixedWindow => -p.t_in(),
            TEndPolicy::At(t) => t,
            TEndPolicy::CouplingCutoff(c) => coupling_cutoff_time(p, c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TransportError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error(transparent)]
    NonPhysical(#[from] SymplecticError),
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),
}

/// Smallest `t > 0` with `ξ(t) ≤ c·ξ₀`. The top-hat switches off at `t₀`.
pub fn coupling_cutoff_time(p: &ScenarioParams, c: f64) -> f64 {
    if p.profile == Profile::IsosoTopHat || p.xi0 == 0.0 {
        return p.t0;
    }
    let below = |t: f64| coupling_xi(t, p) <= c * p.xi0;
    let mut hi = p.t0 + p.tau;
    while !below(hi) {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    while hi - lo > 1e-12 * hi.max(1.0) {
        let m = 0.5 * (lo + hi);
        if below(m) {
            hi = m;
        } else {
            lo = m;
        }
    }
    hi
}

/// Pieces of constant right-hand-side form: `(start, end, top-hat value)`;
/// `None` means the smooth profile is evaluated pointwise.
fn pieces(p: &ScenarioParams, t_in: f64, t_end: f64) -> Vec<(f64, f64, Option<f64>)> {
    match p.profile {
        Profile::Smooth => vec![(t_in, t_end, None)],
        Profile::IsosoTopHat => {
            let cuts = [
                (f64::NEG_INFINITY, -p.t0, 0.0),
                (-p.t0, p.t0, p.xi0),
                (p.t0, f64::INFINITY, 0.0),
            ];
            cuts.iter()
                .filter_map(|&(a, b, xi)| {
                    let (a, b) = (a.max(t_in), b.min(t_end));
                    (b > a).then_some((a, b, Some(xi)))
                })
                .collect()
        }
    }
}

/// Drive the integrator from `t_in` to the configured end, stopping exactly
/// at every time in `stops` (sorted, inside the window). `on_sample` sees the
/// stop points, `on_step` every accepted step. Both receive the coupling
/// value that was in force during the step that produced the state.
pub fn integrate_with<S, T>(
    p: &ScenarioParams,
    cfg: &IntegratorConfig,
    stops: &[f64],
    mut on_sample: S,
    mut on_step: T,
) -> Result<(), TransportError>
where
    S: FnMut(&CovarianceState, &Mat4, f64) -> Result<(), TransportError>,
    T: FnMut(&CovarianceState, f64),
{
    p.validate()?;
    cfg.validate()?;
    let t_end = cfg.t_end_for(p);
    let init = vacuum_initial(p);
    let (s2, e2) = (p.omega_s * p.omega_s, p.omega_e * p.omega_e);
    let opts = OdeOptions {
        rtol: cfg.rtol,
        atol: cfg.atol,
        h_min: cfg.h_min,
        h_max: cfg.max_step_for(p),
    };

    let mut y = init.packed();
    let mut t = init.t;
    let mut stop_iter = stops.iter().copied().peekable();
    // a stop at the very start is served without stepping
    while let Some(&s) = stop_iter.peek() {
        if s > t {
            break;
        }
        if s == t {
            let xi = coupling_xi(t, p);
            let dy = packed_rhs(xi, s2, e2, &y);
            on_sample(&init, &sigma_part(&dy), xi)?;
        }
        stop_iter.next();
    }

    for (a, b, fixed) in pieces(p, init.t, t_end) {
        debug_assert_eq!(a, t);
        let xi_at = |t: f64| fixed.unwrap_or_else(|| coupling_xi(t, p));
        let f = |t: f64, y: &[f64; PACKED]| packed_rhs(xi_at(t), s2, e2, y);
        let mut solver = Dopri5::new(f, t, y, opts);
        loop {
            let target = match stop_iter.peek() {
                Some(&s) if s <= b => s,
                _ => b,
            };
            solver.advance_to(target, |ts, ys, _| {
                on_step(&CovarianceState::unpack(ts, ys), xi_at(ts));
            })?;
            if stop_iter.peek() == Some(&target) {
                stop_iter.next();
                let st = CovarianceState::unpack(target, solver.y());
                on_sample(&st, &sigma_part(solver.dy()), xi_at(target))?;
            }
            if target >= b {
                break;
            }
        }
        t = b;
        y = *solver.y();
    }
    Ok(())
}

fn sigma_part(y: &[f64; PACKED]) -> Mat4 {
    Sym4(y[..10].try_into().unwrap()).to_mat4()
}

/// Sample grid `t_in + k·dt` plus the end point and any top-hat edges.
pub fn sample_times(p: &ScenarioParams, cfg: &IntegratorConfig) -> Vec<f64> {
    let (t_in, t_end) = (p.t_in(), cfg.t_end_for(p));
    let dt = cfg.sample_dt_for(p);
    let n = ((t_end - t_in) / dt).floor() as usize;
    let mut ts: Vec<f64> = (0..=n).map(|k| t_in + k as f64 * dt).filter(|&t| t <= t_end).collect();
    if p.profile == Profile::IsosoTopHat {
        ts.extend([-p.t0, p.t0].into_iter().filter(|&t| t > t_in && t < t_end));
    }
    ts.push(t_end);
    ts.sort_by(f64::total_cmp);
    ts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
    ts
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepStats {
    pub accepted: usize,
}

/// Sampled solution of the transport equation.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub params: ScenarioParams,
    pub samples: Vec<CovarianceState>,
    pub purity_s: Vec<f64>,
    pub purity_e: Vec<f64>,
    pub xi: Vec<f64>,
    derivs: Vec<Mat4>,
    pub stats: StepStats,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.t)
    }

    pub fn last(&self) -> &CovarianceState {
        self.samples.last().expect("trajectory has at least one sample")
    }

    pub fn final_purity(&self) -> f64 {
        *self.purity_s.last().expect("trajectory has at least one sample")
    }

    /// Time derivative of σ at sample `i`.
    pub fn derivative(&self, i: usize) -> &Mat4 {
        &self.derivs[i]
    }

    /// `(t, γ_min)` over the samples.
    pub fn min_purity(&self) -> (f64, f64) {
        self.samples
            .iter()
            .zip(&self.purity_s)
            .map(|(s, &g)| (s.t, g))
            .fold((f64::NAN, f64::INFINITY), |m, x| if x.1 < m.1 { x } else { m })
    }

    /// σ at an arbitrary time, by cubic Hermite interpolation between the
    /// bracketing samples. Exact at sample times.
    pub fn at(&self, t: f64) -> Option<Mat4> {
        let n = self.samples.len();
        if n == 0 || t < self.samples[0].t || t > self.samples[n - 1].t {
            return None;
        }
        let k = self.samples.partition_point(|s| s.t <= t);
        if k == 0 {
            return Some(self.samples[0].sigma);
        }
        let i = k - 1;
        if i + 1 >= n || self.samples[i].t == t {
            return Some(self.samples[i].sigma);
        }
        let (a, b) = (&self.samples[i], &self.samples[i + 1]);
        let h = b.t - a.t;
        let s = (t - a.t) / h;
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        Some(
            a.sigma.scale(h00) + self.derivs[i].scale(h * h10) + b.sigma.scale(h01) + self.derivs[i + 1].scale(h * h11),
        )
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,s11,s12,s22,e11,e12,e22,c11,c12,c21,c22,purity_s,xi")?;
        for ((st, g), xi) in self.samples.iter().zip(&self.purity_s).zip(&self.xi) {
            let m = &st.sigma.0;
            let row = [
                st.t, m[0][0], m[0][1], m[1][1], m[2][2], m[2][3], m[3][3], m[0][2], m[0][3], m[1][2], m[1][3], *g, *xi,
            ];
            let line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }
}

fn collect(p: &ScenarioParams, cfg: &IntegratorConfig, stops: &[f64]) -> Result<Trajectory, TransportError> {
    let mut traj = Trajectory {
        params: *p,
        samples: Vec::with_capacity(stops.len()),
        purity_s: Vec::with_capacity(stops.len()),
        purity_e: Vec::with_capacity(stops.len()),
        xi: Vec::with_capacity(stops.len()),
        derivs: Vec::with_capacity(stops.len()),
        stats: StepStats::default(),
    };
    let mut accepted = 0;
    integrate_with(
        p,
        cfg,
        stops,
        |st, d, xi| {
            traj.purity_s.push(st.purity_s()?);
            traj.purity_e.push(st.purity_e()?);
            traj.samples.push(*st);
            traj.derivs.push(*d);
            traj.xi.push(xi);
            Ok(())
        },
        |_, _| accepted += 1,
    )?;
    traj.stats.accepted = accepted;
    Ok(traj)
}

/// Integrate on the default sample grid.
pub fn integrate(p: &ScenarioParams, cfg: &IntegratorConfig) -> Result<Trajectory, TransportError> {
    collect(p, cfg, &sample_times(p, cfg))
}

/// Integrate and sample exactly at the given times (sorted, within the
/// window); the end of the window is not added.
pub fn integrate_at(p: &ScenarioParams, cfg: &IntegratorConfig, times: &[f64]) -> Result<Trajectory, TransportError> {
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(TransportError::InvalidConfig("sample times must be sorted".into()));
    }
    let (t_in, t_end) = (p.t_in(), cfg.t_end_for(p));
    if times.iter().any(|&t| !(t >= t_in && t <= t_end)) {
        return Err(TransportError::InvalidConfig(format!(
            "sample times must lie in the window [{t_in}, {t_end}]"
        )));
    }
    collect(p, cfg, times)
}

/// Run the smooth profile with `τ = 10⁻⁴·t₀`, the numerical stand-in for the
/// instantaneous switch.
pub fn isoso_reference_run(p: &ScenarioParams, cfg: &IntegratorConfig) -> Result<Trajectory, TransportError> {
    integrate(&isoso_reference_params(p), cfg)
}

pub fn isoso_reference_params(p: &ScenarioParams) -> ScenarioParams {
    p.with_profile(Profile::Smooth).with_tau(1e-4 * p.t0)
}

/// Streaming reductions over every accepted step, for sweeps that do not
/// need the samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSummary {
    pub gamma_min: f64,
    pub t_gamma_min: f64,
    pub gamma_end: f64,
    pub t_end: f64,
    pub max_det_err: f64,
    pub max_purity_diff: f64,
    pub min_nu: f64,
    pub steps: usize,
}

pub fn run_summary(p: &ScenarioParams, cfg: &IntegratorConfig) -> Result<RunSummary, TransportError> {
    let t_end = cfg.t_end_for(p);
    let mut s = RunSummary {
        gamma_min: 1.0,
        t_gamma_min: p.t_in(),
        gamma_end: 1.0,
        t_end,
        max_det_err: 0.0,
        max_purity_diff: 0.0,
        min_nu: 1.0,
        steps: 0,
    };
    let mut first_err = None;
    integrate_with(
        p,
        cfg,
        &[t_end],
        |st, _, _| {
            s.gamma_end = st.purity_s()?;
            Ok(())
        },
        |st, _| {
            s.steps += 1;
            let (gs, ge) = match (st.purity_s(), st.purity_e()) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => {
                    first_err.get_or_insert(e);
                    return;
                }
            };
            if gs < s.gamma_min {
                s.gamma_min = gs;
                s.t_gamma_min = st.t;
            }
            s.max_purity_diff = s.max_purity_diff.max((gs - ge).abs());
            let d = st.diagnostics();
            s.max_det_err = s.max_det_err.max((d.det - 1.0).abs());
            s.min_nu = s.min_nu.min(d.nu_s).min(d.nu_e);
        },
    )?;
    if let Some(e) = first_err {
        return Err(e.into());
    }
    Ok(s)
}
