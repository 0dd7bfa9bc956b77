use proptest::prelude::*;
use werner_core::expr::dimension;
use werner_core::{closed_form_classical, lhv_bound, strategy_value, BellExpression, StrategyMatrix};

/// Small-integer coefficients keep every sum exact, so reorderings compare
/// with `==`.
fn integer_expression(max_parties: usize) -> impl Strategy<Value = BellExpression> {
    (1..=max_parties)
        .prop_flat_map(|m| (Just(m), prop::collection::vec(prop_oneof![2 => Just(0i32), 3 => -6i32..=6], dimension(m))))
        .prop_filter_map("zero expression", |(m, v)| {
            let e = BellExpression::from_vector(m, v.into_iter().map(f64::from).collect()).unwrap();
            (!e.is_zero()).then_some(e)
        })
}

fn real_expression(max_parties: usize) -> impl Strategy<Value = BellExpression> {
    (1..=max_parties)
        .prop_flat_map(|m| (Just(m), prop::collection::vec(prop_oneof![1 => Just(0.0), 3 => -5.0f64..5.0], dimension(m))))
        .prop_filter_map("zero expression", |(m, v)| {
            let e = BellExpression::from_vector(m, v).unwrap();
            (!e.is_zero()).then_some(e)
        })
}

fn homogeneous(max_parties: usize) -> impl Strategy<Value = BellExpression> {
    (1..=max_parties).prop_flat_map(|m| (Just(m), prop::collection::vec(-3.0f64..3.0, 1 << m))).prop_map(|(m, v)| {
        let terms: Vec<(String, f64)> = v
            .iter()
            .enumerate()
            .map(|(bits, &c)| ((0..m).map(|k| if bits >> (m - 1 - k) & 1 == 1 { '1' } else { '0' }).collect(), c))
            .collect();
        BellExpression::new(m, terms).unwrap()
    })
}

proptest! {
    #[test]
    fn sign_symmetry(e in real_expression(4)) {
        prop_assert_eq!(lhv_bound(&-&e).unwrap().value, lhv_bound(&e).unwrap().value);
    }

    #[test]
    fn party_relabeling(e in integer_expression(4), seed in any::<u64>()) {
        let m = e.parties();
        let mut perm: Vec<usize> = (0..m).collect();
        let mut s = seed;
        for i in (1..m).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let p = e.permute_parties(&perm).unwrap();
        prop_assert_eq!(lhv_bound(&p).unwrap().value, lhv_bound(&e).unwrap().value);
    }

    #[test]
    fn setting_swap(e in integer_expression(4), party in 0usize..4) {
        prop_assume!(party < e.parties());
        let s = e.swap_settings(party).unwrap();
        prop_assert_eq!(lhv_bound(&s).unwrap().value, lhv_bound(&e).unwrap().value);
    }

    #[test]
    fn scaling(e in real_expression(4), c in prop_oneof![-100.0f64..-1e-3, 1e-3f64..100.0]) {
        let base = lhv_bound(&e).unwrap().value;
        let scaled = lhv_bound(&e.scaled(c)).unwrap().value;
        prop_assert!((scaled - c.abs() * base).abs() <= 1e-14 * c.abs() * base);
    }

    #[test]
    fn witness_attains_the_bound(e in real_expression(5)) {
        let b = lhv_bound(&e).unwrap();
        let v = strategy_value(&e, &b.witness).unwrap();
        prop_assert_eq!(v.abs(), b.value);
        prop_assert_eq!(v < 0.0, b.achieved_sign < 0);
    }

    #[test]
    fn matrix_consistency(e in real_expression(4)) {
        let m = StrategyMatrix::full(e.parties()).unwrap();
        prop_assert_eq!(m.max_abs_product(e.coefficients()), lhv_bound(&e).unwrap().value);
    }

    #[test]
    fn closed_form_upper_bound(e in homogeneous(5)) {
        prop_assert!(lhv_bound(&e).unwrap().value <= closed_form_classical(&e).unwrap() + 1e-12);
    }
}
