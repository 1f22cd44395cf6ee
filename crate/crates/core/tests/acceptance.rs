//! End-to-end acceptance criteria. Each test prints one PASS/FAIL line.

use std::time::Instant;

use wnv_core::dynamics::{
    classify, comparison_monitor, fronts_monotone, risk_monotone, speed_sandwich_check, spreading_speeds,
    symmetry_defect, Verdict,
};
use wnv_core::eigen::{principal_lambda0, r0_numeric};
use wnv_core::harness::{self, RunConfig, BUNDLED};
use wnv_core::oracle::{homogeneous_ode, homogeneous_ode_uniform, reference_explicit_pde, MIN_REFERENCE_NY};
use wnv_core::stefan::{simulate, DtPolicy, SimControls, OVERSHOOT};
use wnv_core::wavespeed::{c_nu, default_length, DEFAULT_POINTS};
use wnv_core::Model;

fn report(id: u32, name: &str, checks: &[(&str, bool)], started: Instant) -> bool {
    let pass = checks.iter().all(|(_, ok)| *ok);
    let detail: Vec<String> = checks
        .iter()
        .map(|(what, ok)| format!("{}{what}", if *ok { "" } else { "FAILED " }))
        .collect();
    println!(
        "[{}] {id}. {name} ({:.2}s): {}",
        if pass { "PASS" } else { "FAIL" },
        started.elapsed().as_secs_f64(),
        detail.join("; ")
    );
    pass
}

fn bundled(name: &str) -> RunConfig {
    harness::bundled(name).unwrap()
}

#[test]
fn criterion_1_threshold_reproduction() {
    let t = Instant::now();
    let low = harness::report_thresholds(&bundled("vanishing")).unwrap();
    let high = harness::report_thresholds(&bundled("advection")).unwrap();
    let checks = [
        (&*format!("R_bulk {:.4} vs 1.408", low.r_bulk), (low.r_bulk - 1.408).abs() <= 1e-3),
        (
            &*format!("inner R0F(0) at mu=0 {:.4} vs 1.2241", low.risk_initial_mu0.inner),
            (low.risk_initial_mu0.inner - 1.2241).abs() <= 1e-3,
        ),
        (
            &*format!("inner R0F(0) at mu=3 {:.4} vs 0.7831", low.risk_initial.inner),
            (low.risk_initial.inner - 0.7831).abs() <= 1e-3,
        ),
        (
            &*format!("swapped mu* {:.4} vs 5.24", high.mu_star_swapped),
            (high.mu_star_swapped - 5.24).abs() <= 0.01,
        ),
        ("under 1 s", t.elapsed().as_secs_f64() < 1.0),
    ];
    assert!(report(1, "threshold reproduction", &checks, t));
}

#[test]
fn criterion_2_eigen_consistency() {
    let t = Instant::now();
    let m0 = bundled("spreading").model().unwrap();
    let numeric = r0_numeric(&m0, -15.0, 15.0, 0.0, 401).unwrap().value;
    let closed = m0.r0_closed_form(-15.0, 15.0, 0.0).unwrap().value;
    let gap = (numeric - closed).abs() / closed;

    let mut sign_ok = true;
    let mut pairs = 0;
    for mu in [0.0, 1.0, 2.0, 3.0] {
        let m = m0.with_param("mu", mu).unwrap();
        for h0 in [5.0, 15.0, 30.0] {
            let lambda = principal_lambda0(&m, -h0, h0, mu, 401).unwrap().value;
            let r = r0_numeric(&m, -h0, h0, mu, 401).unwrap().value;
            sign_ok &= (lambda < 0.0) == (r > 1.0);
            pairs += 1;
            if mu == 0.0 {
                let cf = m.r0_closed_form(-h0, h0, 0.0).unwrap().value;
                sign_ok &= (lambda < 0.0) == (cf > 1.0);
                pairs += 1;
            }
        }
    }
    let checks = [
        (&*format!("R0 numeric {numeric:.6} vs closed {closed:.6}, gap {gap:.2e}"), gap < 5e-3),
        (&*format!("sign agreement on {pairs} pairs"), sign_ok),
        ("under 30 s", t.elapsed().as_secs_f64() < 30.0),
    ];
    assert!(report(2, "eigen consistency", &checks, t));
}

#[test]
fn criterion_3_dichotomy_reproduction() {
    let t = Instant::now();
    let van = bundled("vanishing");
    let mv = van.model().unwrap();
    let tv = simulate(&mv, &van.profile, &van.controls).unwrap();
    let ov = classify(&tv, &mv, &van.thresholds);
    let last = tv.len() - 1;
    let from = tv.times.partition_point(|s| *s < 0.8 * tv.horizon());
    let growth = (tv.width(last) - tv.width(from)) / tv.width(from);

    let spr = bundled("spreading");
    let ms = spr.model().unwrap();
    let ts = simulate(&ms, &spr.profile, &spr.controls).unwrap();
    let os = classify(&ts, &ms, &spr.thresholds);
    let (us, vs) = ms.endemic().unwrap();
    let k = ts.len() - 1;
    let mid = ((ts.mid_u[k] - us) / us).abs().max(((ts.mid_v[k] - vs) / vs).abs());

    let checks = [
        (&*format!("mu=3 verdict {}", ov.verdict), ov.verdict == Verdict::Vanishing),
        (
            &*format!("mu=3 sup at T=200 ({:.3e}, {:.3e}) < 1e-3", tv.sup_u[last], tv.sup_v[last]),
            tv.sup_u[last] < 1e-3 && tv.sup_v[last] < 1e-3,
        ),
        (&*format!("mu=3 width growth over final 20% {growth:.3e} < 1e-3"), growth < 1e-3),
        (&*format!("mu=0 verdict {}", os.verdict), os.verdict == Verdict::Spreading),
        (&*format!("mu=0 midpoint distance {mid:.3e} <= 0.02"), mid <= 0.02),
    ];
    assert!(report(3, "dichotomy reproduction", &checks, t));
}

#[test]
fn criterion_4_speed_asymmetry_and_sandwich() {
    let t = Instant::now();
    let cfg = bundled("advection");
    let m2 = cfg.model().unwrap();
    let wave = c_nu(&m2, m2.raw.expansion, default_length(&m2), DEFAULT_POINTS).unwrap().c_nu;

    let tr2 = simulate(&m2, &cfg.profile, &cfg.controls).unwrap();
    let s2 = spreading_speeds(&tr2).unwrap();
    let margin = s2.right_speed - s2.left_speed;
    let sandwich = speed_sandwich_check(&s2, wave);

    let m0 = m2.with_param("mu", 0.0).unwrap();
    let tr0 = simulate(&m0, &cfg.profile, &cfg.controls).unwrap();
    let s0 = spreading_speeds(&tr0).unwrap();
    let mean = 0.5 * (s0.left_speed + s0.right_speed);
    let asym = (s0.left_speed - s0.right_speed).abs() / mean;
    let agree = ((s0.left_speed - wave) / wave).abs().max(((s0.right_speed - wave) / wave).abs());

    let checks = [
        (
            &*format!(
                "mu=2 right - left = {:.4} - {:.4} = {margin:.4} > 3 x residual {:.2e}",
                s2.right_speed, s2.left_speed, s2.fit_residual
            ),
            margin > 3.0 * s2.fit_residual,
        ),
        (
            &*format!(
                "sandwich with c_nu {wave:.4}: margins {:.4}, {:.4}",
                sandwich.left_margin, sandwich.right_margin
            ),
            sandwich.pass,
        ),
        (&*format!("mu=0 asymmetry {asym:.2e} < 1%"), asym < 0.01),
        (&*format!("mu=0 speeds within {agree:.2e} of c_nu (10%)"), agree < 0.1),
    ];
    assert!(report(4, "speed asymmetry and sandwich", &checks, t));
}

#[test]
fn criterion_5_invariant_suite() {
    let t = Instant::now();
    let mut checks: Vec<(String, bool)> = Vec::new();
    for (name, _) in BUNDLED {
        let cfg = bundled(name);
        let m = cfg.model().unwrap();
        let traj = simulate(&m, &cfg.profile, &cfg.controls).unwrap();
        let (n1, n2) = (m.raw.capacity_birds, m.raw.capacity_mosquitoes);
        let bounds = (0..traj.len()).all(|k| {
            traj.inf_u[k] >= 0.0
                && traj.inf_v[k] >= 0.0
                && traj.sup_u[k] <= n1
                && traj.sup_v[k] <= n2 + OVERSHOOT * n2
        });
        let ode = homogeneous_ode(&m, cfg.profile.sup(), &traj.times, 0.01).unwrap();
        let monitor = comparison_monitor(&traj, &m, &ode).unwrap();
        checks.push((format!("{name}: bounds"), bounds));
        checks.push((format!("{name}: fronts monotone"), fronts_monotone(&traj)));
        checks.push((
            format!("{name}: comparison excess ({:.1e}, {:.1e})", monitor.max_excess_u, monitor.max_excess_v),
            monitor.pass,
        ));
        checks.push((format!("{name}: risk monotone"), risk_monotone(&traj, 0.0)));
        if m.raw.advection == 0.0 {
            let defect = symmetry_defect(&traj);
            checks.push((format!("{name}: mirror defect {defect:.1e}"), defect < 1e-6));
        }
    }
    let borrowed: Vec<(&str, bool)> = checks.iter().map(|(s, b)| (s.as_str(), *b)).collect();
    assert!(report(5, "invariant suite", &borrowed, t));
}

#[test]
fn criterion_6_convergence_suite() {
    let t = Instant::now();
    let cfg = bundled("advection");
    let m = cfg.model().unwrap();
    let h_end = |n_y: usize, dt: f64| {
        let controls = SimControls {
            n_y,
            dt: DtPolicy::Fixed(dt),
            ..cfg.controls.clone()
        };
        *simulate(&m, &cfg.profile, &controls).unwrap().h.last().unwrap()
    };
    let (h1, h2) = (h_end(401, 0.01), h_end(803, 0.005));
    let solver_gap = (h1 - h2).abs() / h2;

    let ml = bundled("spreading").model().unwrap();
    let r = |n| r0_numeric(&ml, -15.0, 15.0, 0.0, n).unwrap().value;
    let (a, b, c) = (r(100), r(201), r(403));
    let eigen_factor = (a - b) / (b - c);

    let end = |dt: f64| {
        let o = homogeneous_ode_uniform(&ml, (0.1, 2.0), 8.0, dt).unwrap();
        (*o.u.last().unwrap(), *o.v.last().unwrap())
    };
    let exact = end(1e-3);
    let err = |dt: f64| {
        let (u, v) = end(dt);
        (u - exact.0).abs().max((v - exact.1).abs())
    };
    let rk_order = (err(0.05) / err(0.025)).log2();

    let s = default_length(&m);
    let w1 = c_nu(&m, m.raw.expansion, s, DEFAULT_POINTS).unwrap().c_nu;
    let w2 = c_nu(&m, m.raw.expansion, 2.0 * s, 2 * DEFAULT_POINTS).unwrap().c_nu;
    let wave_gap = (w1 - w2).abs() / w2;

    let checks = [
        (&*format!("h(T) {h1:.5} vs {h2:.5}, gap {solver_gap:.2e} < 1%"), solver_gap < 0.01),
        (&*format!("eigen factor {eigen_factor:.3} >= 3.5"), eigen_factor >= 3.5),
        (&*format!("RK4 observed order {rk_order:.2} ~ 4"), (rk_order - 4.0).abs() < 0.5),
        (&*format!("c_nu {w1:.7} vs {w2:.7} under S -> 2S, gap {wave_gap:.2e} < 0.5%"), wave_gap < 5e-3),
        ("under 10 min", t.elapsed().as_secs_f64() < 600.0),
    ];
    assert!(report(6, "convergence suite", &checks, t));
}

#[test]
fn criterion_7_cross_solver_oracle() {
    let t = Instant::now();
    let cfg = bundled("vanishing");
    let m: Model = cfg.model().unwrap();
    let controls = SimControls {
        t_max: 5.0,
        ..cfg.controls.clone()
    };
    let semi = simulate(&m, &cfg.profile, &controls).unwrap();
    let explicit = reference_explicit_pde(&m, &cfg.profile, 5.0, MIN_REFERENCE_NY, 1.0).unwrap();
    let (a, b) = (*semi.h.last().unwrap(), *explicit.h.last().unwrap());
    let gap = (a - b).abs() / b;
    let checks = [
        (&*format!("h(5) {a:.6} vs reference {b:.6}, gap {gap:.2e} < 1%"), gap < 0.01),
        ("under 2 min", t.elapsed().as_secs_f64() < 120.0),
    ];
    assert!(report(7, "cross-solver oracle", &checks, t));
}
