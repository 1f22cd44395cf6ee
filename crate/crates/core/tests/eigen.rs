use proptest::prelude::*;

use wnv_core::eigen::{dense_lambda0, principal_lambda0, r0_numeric};
use wnv_core::model::presets::{high_transmission, low_transmission};
use wnv_core::Model;

fn low(mu: f64) -> Model {
    Model::new(low_transmission(mu)).unwrap()
}

#[test]
fn closed_form_matches_numeric_without_advection() {
    let m = low(0.0);
    for h0 in [5.0, 15.0, 30.0] {
        let numeric = r0_numeric(&m, -h0, h0, 0.0, 401).unwrap().value;
        let closed = m.r0_closed_form(-h0, h0, 0.0).unwrap().value;
        assert!((numeric - closed).abs() / closed < 1e-4, "h0 {h0}: {numeric} vs {closed}");
    }
}

#[test]
fn second_order_grid_convergence() {
    let m = low(0.0);
    let r = |n| r0_numeric(&m, -15.0, 15.0, 0.0, n).unwrap().value;
    let (a, b, c) = (r(100), r(201), r(403));
    let factor = (a - b) / (b - c);
    assert!(factor >= 3.5, "factor {factor}");
    let l = |n| principal_lambda0(&m, -15.0, 15.0, 0.0, n).unwrap().value;
    let (a, b, c) = (l(100), l(201), l(403));
    assert!((a - b) / (b - c) >= 3.5);
}

#[test]
fn sign_of_lambda0_matches_reproduction_number() {
    for mu in [0.0, 1.0, 2.0, 3.0] {
        let m = low(mu);
        for h0 in [5.0, 15.0, 30.0] {
            let lambda = principal_lambda0(&m, -h0, h0, mu, 401).unwrap().value;
            let r = r0_numeric(&m, -h0, h0, mu, 401).unwrap().value;
            assert_eq!(lambda < 0.0, r > 1.0, "mu {mu}, h0 {h0}: lambda0 {lambda}, R {r}");
        }
    }
}

#[test]
fn inverse_iteration_matches_dense_spectrum() {
    let m = Model::new(high_transmission(2.0)).unwrap();
    let sparse = principal_lambda0(&m, -10.0, 10.0, 2.0, 60).unwrap().value;
    let dense = dense_lambda0(&m, -10.0, 10.0, 2.0, 60).unwrap();
    assert!((sparse - dense).abs() < 1e-8 * (1.0 + dense.abs()));
}

#[test]
fn eigenvectors_are_positive() {
    let m = low(2.0);
    let e = principal_lambda0(&m, -15.0, 15.0, 2.0, 201).unwrap();
    assert!(e.phi.iter().chain(&e.psi).all(|v| *v > 0.0));
    let r = r0_numeric(&m, -15.0, 15.0, 2.0, 201).unwrap();
    assert!(r.phi.iter().chain(&r.psi).all(|v| *v > 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn wider_intervals_raise_risk(h0 in 2.0f64..25.0, mu in 0.0f64..3.0, grow in 1.1f64..2.0) {
        let m = low(mu);
        let n = 201;
        let narrow = r0_numeric(&m, -h0, h0, mu, n).unwrap().value;
        let wide = r0_numeric(&m, -h0 * grow, h0 * grow, mu, n).unwrap().value;
        prop_assert!(wide > narrow);
        let l_narrow = principal_lambda0(&m, -h0, h0, mu, n).unwrap().value;
        let l_wide = principal_lambda0(&m, -h0 * grow, h0 * grow, mu, n).unwrap().value;
        prop_assert!(l_wide < l_narrow);
    }

    #[test]
    fn advection_lowers_closed_form_risk(h0 in 1.0f64..40.0, mu in 0.0f64..5.0) {
        let m = low(mu);
        let with = m.r0_closed_form(-h0, h0, mu).unwrap();
        let without = m.r0_closed_form(-h0, h0, 0.0).unwrap();
        prop_assert!(with.value <= without.value);
        prop_assert!((with.value * with.value - with.inner).abs() < 1e-12 * with.inner.max(1.0));
    }

    #[test]
    fn translation_invariance(shift in -50.0f64..50.0, mu in 0.0f64..2.0) {
        let m = low(mu);
        let a = r0_numeric(&m, -10.0, 10.0, mu, 101).unwrap().value;
        let b = r0_numeric(&m, -10.0 + shift, 10.0 + shift, mu, 101).unwrap().value;
        prop_assert!((a - b).abs() < 1e-9 * a);
    }
}
