use wnv_core::model::presets::high_transmission;
use wnv_core::wavespeed::{c_nu, default_length, reaction_scale, shifted_speeds, solve_profile, NEWTON_TOLERANCE};
use wnv_core::Model;

fn model() -> Model {
    Model::new(high_transmission(0.0)).unwrap()
}

#[test]
fn speed_grows_with_expansion() {
    let m = model();
    let s = default_length(&m);
    let speeds: Vec<f64> = [1.0, 2.0, 4.0, 8.0].iter().map(|nu| c_nu(&m, *nu, s, 2001).unwrap().c_nu).collect();
    assert!(speeds.windows(2).all(|w| w[1] > w[0]), "{speeds:?}");
}

#[test]
fn speed_vanishes_with_expansion() {
    let m = model();
    let s = default_length(&m);
    let a = c_nu(&m, 0.01, s, 2001).unwrap().c_nu;
    let b = c_nu(&m, 0.001, s, 2001).unwrap().c_nu;
    assert!(b < a && a < 0.01, "{a} {b}");
}

#[test]
fn truncation_doubling_is_harmless() {
    let m = model();
    let s = default_length(&m);
    let a = c_nu(&m, 4.0, s, 4001).unwrap().c_nu;
    let b = c_nu(&m, 4.0, 2.0 * s, 8001).unwrap().c_nu;
    assert!((a - b).abs() / a < 0.005, "{a} vs {b}");
}

#[test]
fn root_sits_inside_admissible_range() {
    let m = model();
    let s = default_length(&m);
    let w = c_nu(&m, 4.0, s, 2001).unwrap();
    let p = &w.profile;
    assert!(p.converged);
    assert!((4.0 * p.uprime0 - w.c_nu).abs() < 0.01);
    assert!(p.newton_residual <= NEWTON_TOLERANCE * reaction_scale(&m));
    let beyond = solve_profile(&m, w.c_nu * 1.05, s, 2001).unwrap();
    assert!(beyond.converged);
}

#[test]
fn profiles_increase_strictly_below_plateau() {
    let m = model();
    let s = default_length(&m);
    let (us, vs) = m.endemic().unwrap();
    for c in [0.0, 0.5, 1.0] {
        let p = solve_profile(&m, c, s, 2001).unwrap();
        assert!(p.converged);
        for (f, top) in [(&p.u, us), (&p.v, vs)] {
            for w in f.windows(2) {
                assert!(w[1] > w[0] || w[0] >= top * (1.0 - 1e-8), "c {c}");
            }
            assert_eq!(*f.last().unwrap(), top);
        }
    }
}

#[test]
fn shifted_rates_bracket_the_nominal_speed() {
    let m = model();
    let out = shifted_speeds(&m, 4.0, 0.005, default_length(&m), 2001);
    let speeds: Vec<f64> = out.iter().map(|s| s.c_nu.unwrap()).collect();
    assert!(speeds[0] > speeds[1] && speeds[1] > speeds[2], "{speeds:?}");
}
