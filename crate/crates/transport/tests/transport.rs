use cho_model::{adiabatic_frame, coupling_xi, Profile, ScenarioParams};
use cho_symplectic::{purity_from_block, Mat4};
use cho_transport::{
    coupling_cutoff_time, integrate, integrate_at, isoso_reference_run, run_summary, transport_rhs_xi, vacuum_initial,
    IntegratorConfig, TEndPolicy,
};

/// Fixed-step RK4 from the vacuum at `t_in`. Inside the top-hat window the
/// coupling is held at ξ₀ (the edge itself would otherwise be sampled as 0).
fn rk4_sigma(p: &ScenarioParams, t1: f64, dt: f64) -> Mat4 {
    let mut s = vacuum_initial(p).sigma;
    let t0 = p.t_in();
    let n = ((t1 - t0) / dt).round() as usize;
    let h = (t1 - t0) / n as f64;
    let xi = |t: f64| match p.profile {
        Profile::IsosoTopHat => p.xi0,
        Profile::Smooth => coupling_xi(t, p),
    };
    let f = |t: f64, s: &Mat4| transport_rhs_xi(xi(t), s, p);
    for k in 0..n {
        let t = t0 + k as f64 * h;
        let k1 = f(t, &s);
        let k2 = f(t + 0.5 * h, &(s + k1.scale(0.5 * h)));
        let k3 = f(t + 0.5 * h, &(s + k2.scale(0.5 * h)));
        let k4 = f(t + h, &(s + k3.scale(h)));
        s = s + (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(h / 6.0);
    }
    s
}

#[test]
fn decoupled_run_stays_pure() {
    let p = ScenarioParams::smooth(1.0, 2.0, 0.0, 10.0, 1.0).unwrap();
    let tr = integrate(&p, &IntegratorConfig::default()).unwrap();
    assert!(tr.purity_s.iter().all(|g| (g - 1.0).abs() < 1e-10));
}

#[test]
fn top_hat_matches_fixed_step_rk4() {
    let p = ScenarioParams::isoso(1.0, 2.0, 0.9, 10.0).unwrap();
    let tr = integrate_at(&p, &IntegratorConfig::default(), &[0.0]).unwrap();
    let oracle = rk4_sigma(&p, 0.0, 1e-5);
    let got = tr.samples[0].sigma;
    assert!(got.max_abs_diff(&oracle) < 1e-8, "{}", got.max_abs_diff(&oracle));
    let g_oracle = purity_from_block(&oracle.block(0, 0)).unwrap();
    assert!((tr.purity_s[0] - g_oracle).abs() < 1e-9);
}

#[test]
fn smooth_profile_matches_fixed_step_rk4() {
    let p = ScenarioParams::smooth(1.0, 2.0, 0.7, 2.0, 0.5).unwrap();
    let tr = integrate_at(&p, &IntegratorConfig::default(), &[1.5]).unwrap();
    let oracle = rk4_sigma(&p, 1.5, 1e-4);
    assert!(tr.samples[0].sigma.max_abs_diff(&oracle) < 1e-8);
}

#[test]
fn invariants_hold_along_trajectories() {
    for psi in [0.5, 0.9, 1.1, 1.5] {
        let p = ScenarioParams::smooth(1.0, 2.0, psi, 5.0, 1.0).unwrap();
        let tr = integrate(&p, &IntegratorConfig::default()).unwrap();
        for (i, st) in tr.samples.iter().enumerate() {
            assert!((tr.purity_s[i] - tr.purity_e[i]).abs() < 1e-8);
            let d = st.diagnostics();
            // det σ is recomputed from entries: a relative entry error δ moves
            // it by up to ~4δ‖σ‖‖σ⁻¹‖ = 4δ‖σ‖² for a symplectic σ
            let scale = st.sigma.max_abs().powi(2);
            assert!((d.det - 1.0).abs() < 1e-8 * scale, "psi={psi} t={} det={}", st.t, d.det);
            assert!(d.valid);
        }
        assert!(tr.samples.windows(2).all(|w| w[1].t > w[0].t));
    }
}

#[test]
fn cross_correlations_build_up() {
    let p = ScenarioParams::smooth(1.0, 2.0, 0.9, 1.0, 1.0).unwrap();
    let tr = integrate_at(&p, &IntegratorConfig::default(), &[0.0]).unwrap();
    let c = tr.samples[0].cross_block();
    assert!(c.0.iter().flatten().any(|x| x.abs() > 1e-6));
}

#[test]
fn supercritical_decay_rate() {
    let p = ScenarioParams::smooth(1.0, 2.0, 1.1, 10.0, 1.0).unwrap();
    let ts: Vec<f64> = (0..=40).map(|k| 0.2 * k as f64).collect();
    let tr = integrate_at(&p, &IntegratorConfig::default(), &ts).unwrap();
    // purity decays while the coupling is on
    let (first, last) = (tr.purity_s[0], *tr.purity_s.last().unwrap());
    assert!(last < first);
    let slope = (last.ln() - first.ln()) / 8.0;
    let w1 = adiabatic_frame(0.0, &p).unwrap().omega1_abs;
    assert!((slope + w1).abs() < 0.1 * w1, "{slope} vs {w1}");
}

#[test]
fn slow_switching_recoheres() {
    let p = ScenarioParams::smooth(1.0, 2.0, 0.9, 1.0, 50.0).unwrap();
    let s = run_summary(&p, &IntegratorConfig::cutoff()).unwrap();
    assert!(s.gamma_end > 0.999, "{}", s.gamma_end);
}

#[test]
fn top_hat_state_is_continuous_at_edges() {
    let p = ScenarioParams::isoso(1.0, 2.0, 1.1, 2.0).unwrap();
    let cfg = IntegratorConfig::until(3.0);
    let d = 1e-7;
    let tr = integrate_at(&p, &cfg, &[2.0 - d, 2.0, 2.0 + d]).unwrap();
    let jump_l = tr.samples[1].sigma.max_abs_diff(&tr.samples[0].sigma);
    let jump_r = tr.samples[2].sigma.max_abs_diff(&tr.samples[1].sigma);
    let scale = tr.samples[1].sigma.max_abs();
    assert!(jump_l < 1e-5 * scale && jump_r < 1e-5 * scale);
    // the right-hand side itself does jump
    assert_eq!(tr.xi[1], p.xi0);
    assert_eq!(tr.xi[2], 0.0);
}

#[test]
fn purity_freezes_after_cutoff() {
    let p = ScenarioParams::smooth(1.0, 2.0, 0.9, 1.0, 2.0).unwrap();
    let tc = coupling_cutoff_time(&p, 1e-10);
    let cfg = IntegratorConfig::until(tc + 10.0);
    let tr = integrate_at(&p, &cfg, &[tc, tc + 10.0]).unwrap();
    let drift = (tr.purity_s[1] - tr.purity_s[0]).abs() / 10.0;
    assert!(drift < 1e-9, "{drift:e}");
}

#[test]
fn halving_the_step_cap_is_invisible() {
    let p = ScenarioParams::smooth(1.0, 2.0, 0.9, 1.0, 2.0).unwrap();
    let base = IntegratorConfig::default();
    let h = base.max_step_for(&p);
    let a = run_summary(&p, &base).unwrap();
    let b = run_summary(
        &p,
        &IntegratorConfig {
            max_step: Some(0.5 * h),
            ..base
        },
    )
    .unwrap();
    assert!(
        (a.gamma_end - b.gamma_end).abs() < 10.0 * base.rtol,
        "{:e}",
        a.gamma_end - b.gamma_end
    );
}

#[test]
fn hermite_interpolation_between_samples() {
    let p = ScenarioParams::smooth(1.0, 2.0, 0.9, 1.0, 1.0).unwrap();
    let tr = integrate(&p, &IntegratorConfig::default()).unwrap();
    let i = tr.len() / 2;
    let (ta, tb) = (tr.samples[i].t, tr.samples[i + 1].t);
    let tm = 0.5 * (ta + tb);
    let exact = integrate_at(&p, &IntegratorConfig::default(), &[tm]).unwrap().samples[0].sigma;
    let interp = tr.at(tm).unwrap();
    assert!(interp.max_abs_diff(&exact) < 1e-6, "{:e}", interp.max_abs_diff(&exact));
    assert_eq!(tr.at(ta).unwrap(), tr.samples[i].sigma);
    assert!(tr.at(tr.last().t + 1.0).is_none());
}

#[test]
fn reference_run_close_to_top_hat() {
    let p = ScenarioParams::isoso(1.0, 2.0, 0.9, 2.0).unwrap();
    let cfg = IntegratorConfig::default();
    let r = isoso_reference_run(&p, &cfg).unwrap();
    let ts: Vec<f64> = r.times().filter(|t| t.abs() < 2.0).collect();
    let exact = integrate_at(&p, &cfg, &ts).unwrap();
    let mut k = 0;
    let mut worst = 0.0f64;
    for (t, g) in r.times().zip(&r.purity_s) {
        if t.abs() < 2.0 {
            worst = worst.max((g - exact.purity_s[k]).abs());
            k += 1;
        }
    }
    assert!(worst < 5e-3, "{worst}");
}

#[test]
fn csv_layout() {
    let p = ScenarioParams::smooth(1.0, 2.0, 0.5, 1.0, 0.5).unwrap();
    let cfg = IntegratorConfig {
        t_end_policy: TEndPolicy::At(0.0),
        ..Default::default()
    };
    let tr = integrate(&p, &cfg).unwrap();
    let mut buf = Vec::new();
    tr.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,s11,s12,s22,e11,e12,e22,c11,c12,c21,c22,purity_s,xi"
    );
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(row.len(), 13);
    assert_eq!(row[0], p.t_in());
    assert_eq!(text.lines().count(), tr.len() + 1);
}
