use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use proptest::prelude::*;
use werner_core::werner::{
    detect_visibility, e3_entanglement_onset, ghz_amplitudes, ghz_separability_threshold, lemma4_upper, theorem1_general_range,
    theorem1_homogeneous_range, visibility_lower_bound,
};
use werner_core::{builtin, WernerFamily};

fn theta_grid() -> impl Iterator<Item = f64> {
    (1..=50).map(|k| FRAC_PI_2 * k as f64 / 51.0)
}

#[test]
fn upper_bound_dominates_exact_threshold_on_grid() {
    for m in 2..=4 {
        for theta in theta_grid() {
            let upper = lemma4_upper(&ghz_amplitudes(m, theta)).unwrap();
            let exact = ghz_separability_threshold(m, theta).unwrap();
            assert!(upper >= exact - 1e-12, "m={m} θ={theta}: {upper} < {exact}");
        }
    }
}

#[test]
fn e3_onset_is_above_exact_threshold() {
    for m in 2..=4 {
        for theta in theta_grid() {
            let exact = ghz_separability_threshold(m, theta).unwrap();
            if let Some(onset) = e3_entanglement_onset(&ghz_amplitudes(m, theta)).unwrap() {
                assert!(onset >= exact - 1e-9, "m={m} θ={theta}: {onset} < {exact}");
            }
        }
    }
}

#[test]
fn detection_respects_visibility_bound() {
    let d = detect_visibility(&builtin("chsh").unwrap(), &WernerFamily::ghz(2, FRAC_PI_4).unwrap(), 3).unwrap();
    let v = d.threshold.unwrap();
    let lower = visibility_lower_bound(2, 2.0, 2.0 * 2f64.sqrt()).unwrap();
    assert!(v >= lower - 1e-3 && v <= 1.0, "{v} vs {lower}");
}

proptest! {
    #[test]
    fn ranges_are_symmetric(m in 2usize..=12, gammas in prop::collection::vec(0.5f64..50.0, 11)) {
        let r = theorem1_homogeneous_range(m).unwrap();
        prop_assert_eq!(r.theta_u, PI - r.theta_l);
        prop_assert_eq!(r.r, (r.theta_u - r.theta_l) / PI);
        if let Some(g) = theorem1_general_range(m, &gammas[..m - 1]).unwrap() {
            prop_assert_eq!(g.theta_u, PI - g.theta_l);
            prop_assert!((0.0..=1.0).contains(&g.r));
        }
    }

    #[test]
    fn thresholds_stay_in_unit_interval(m in 1usize..=10, theta in 1e-9f64..FRAC_PI_2, c1 in 0.1f64..10.0, ratio in 1.0001f64..5.0) {
        prop_assume!(theta < FRAC_PI_2);
        let t = ghz_separability_threshold(m, theta).unwrap();
        prop_assert!((0.0..=1.0).contains(&t));
        let v = visibility_lower_bound(m, c1, c1 * ratio).unwrap();
        prop_assert!((0.0..=1.0).contains(&v));
    }
}
