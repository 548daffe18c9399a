use cho_adiabatic::*;
use cho_isoso::isoso_purity;
use cho_model::{coupling_xi, ScenarioParams};
use cho_transport::{coupling_cutoff_time, integrate_at, IntegratorConfig};

fn fig8(tau: f64) -> ScenarioParams {
    ScenarioParams::smooth(1.0, 2.0, 0.9, 1.0, tau).unwrap()
}

/// (max |γ_lo − γ|, max |γ_lo + δγ − γ|) over `|t| ≤ 4τ`.
fn errors(p: &ScenarioParams) -> (f64, f64) {
    let ts: Vec<f64> = (0..=800)
        .map(|k| -4.0 * p.tau + 8.0 * p.tau * k as f64 / 800.0)
        .collect();
    let tr = integrate_at(p, &IntegratorConfig::default(), &ts).unwrap();
    let nlo = nlo_series(p, &ts, &AdiabaticConfig::default()).unwrap();
    nlo.iter().zip(&tr.purity_s).fold((0.0f64, 0.0f64), |(a, b), (n, g)| {
        (a.max((n.gamma_lo - g).abs()), b.max((n.gamma_nlo() - g).abs()))
    })
}

#[test]
fn leading_order_at_slow_switching() {
    let (lo50, _) = errors(&fig8(50.0));
    let (lo10, _) = errors(&fig8(10.0));
    assert!(lo50 < 1e-2, "{lo50}");
    assert!(lo50 < lo10);
    assert!(latetime_purity(&fig8(50.0), &IntegratorConfig::default()).unwrap() > 0.999);
}

#[test]
fn next_to_leading_order_halves_the_error() {
    let (lo, nlo) = errors(&fig8(10.0));
    assert!(nlo <= 0.5 * lo, "lo {lo} nlo {nlo}");
}

#[test]
fn correction_vanishes_once_decoupled() {
    let p = fig8(10.0);
    let t = coupling_cutoff_time(&p, 1e-10 / 0.9) + 1.0;
    assert!(coupling_xi(t, &p) / (p.omega_s * p.omega_e) < 1e-10);
    let r = nlo_integrals(t, &p, &AdiabaticConfig::default()).unwrap();
    assert!(r.delta_gamma.abs() < 1e-8, "{}", r.delta_gamma);
}

#[test]
fn particle_creation_dominates() {
    // interaction region: where the coupling exceeds half its peak
    let p = fig8(10.0);
    let ts: Vec<f64> = (0..=2000).map(|k| -40.0 + 0.04 * k as f64).collect();
    let n = nlo_series(&p, &ts, &AdiabaticConfig::default()).unwrap();
    let sel: Vec<_> = n.iter().filter(|r| coupling_xi(r.t, &p) >= 0.5 * p.xi0).collect();
    let dom = sel
        .iter()
        .filter(|r| r.itilde_omega.abs() > r.itilde_theta.abs())
        .count();
    assert!(dom as f64 >= 0.9 * sel.len() as f64, "{dom}/{}", sel.len());
}

#[test]
fn contributions_scale_with_adiabatic_parameter() {
    let peak = |tau: f64| {
        let p = fig8(tau);
        let ts: Vec<f64> = (0..=400).map(|k| -3.0 * tau + 6.0 * tau * k as f64 / 400.0).collect();
        nlo_series(&p, &ts, &AdiabaticConfig::default())
            .unwrap()
            .iter()
            .map(|r| r.itilde_omega.abs().max(r.itilde_theta.abs()))
            .fold(0.0, f64::max)
    };
    let c10 = 10.0 * peak(10.0);
    for tau in [20.0, 40.0] {
        assert!(tau * peak(tau) <= 1.5 * c10, "τ = {tau}");
    }
}

#[test]
fn sharp_switching_limit_matches_isoso() {
    let p = ScenarioParams::isoso(1.0, 2.0, 0.9, 3.0).unwrap();
    let g = latetime_purity(&p, &IntegratorConfig::default()).unwrap();
    let a = isoso_purity(p.t0, &p).unwrap();
    assert!((g - a).abs() < 1e-8, "{g} vs {a}");
}

#[test]
fn latetime_loss_is_not_a_power_law() {
    let p = fig8(4.0);
    let xs: Vec<f64> = (0..=8).map(|k| 4.0 * 5f64.powf(k as f64 / 8.0)).collect();
    let cfg = IntegratorConfig {
        rtol: 1e-12,
        atol: 1e-15,
        ..Default::default()
    };
    let pts = nonanalyticity_slope(&p, &xs, &cfg).unwrap();
    assert!(pts.iter().all(|q| q.resolved), "{pts:?}");
    let s: Vec<f64> = pts.iter().map(|q| q.slope.unwrap()).collect();
    assert!(s.windows(2).all(|w| w[1] > w[0]), "{s:?}");
}

#[test]
fn threshold_grows_linearly() {
    let base = fig8(1.0);
    let taus: Vec<f64> = (0..=8).map(|k| 10f64.powf(k as f64 / 8.0)).collect();
    let tg: Vec<f64> = (0..19).map(|k| 0.05 * 10f64.powf(k as f64 / 6.0)).collect();
    let s = recoherence_threshold_scan(&base, &taus, &tg, 0.01, &IntegratorConfig::default()).unwrap();
    assert!(s.slope > 0.0 && s.r_squared > 0.95, "{s:?}");

    // a criterion of 1 is met whenever the purity does not end below its minimum
    let s = recoherence_threshold_scan(&base, &[2.0], &[0.5, 1.0, 2.0], 1.0, &IntegratorConfig::default()).unwrap();
    assert_eq!(s.points[0].t_omega_thr, 2.0);
}
