use std::f64::consts::PI;

use grunwald::symbols::coercivity_lower_bound;
use grunwald::{
    certify_stability, combined_symbol, optimal_shift, psi_eval, psi_real_closed_form,
    second_order_scheme, third_order_scheme, FracOrder, Scheme,
};
use proptest::prelude::*;

#[test]
fn closed_form_on_ten_thousand_points() {
    for alpha in [0.4, 0.8, 1.3, 1.8, 2.5] {
        let order = FracOrder::new(alpha).unwrap();
        for p in -1..=2i64 {
            for i in 0..10_000 {
                let k = -PI + 2.0 * PI * (i as f64 + 0.5) / 10_000.0;
                let direct = psi_eval(order, 1.0, p as f64, k).re;
                let closed = psi_real_closed_form(order, p, k);
                assert!(
                    (direct - closed).abs() <= 1e-12,
                    "alpha {alpha} p {p} k {k}"
                );
            }
        }
    }
}

#[test]
fn higher_order_symbols_certify() {
    let certify = |scheme| certify_stability(&combined_symbol(&scheme, 1.0), 4096).unwrap();
    for alpha in [1.1, 1.2, 1.5, 1.8, 1.95] {
        let r = certify(second_order_scheme(FracOrder::new(alpha).unwrap()).unwrap());
        assert!(
            !r.sign_change && r.c_coercivity > 0.0,
            "alpha {alpha}: {r:?}"
        );
    }
    // the three-term recipe keeps a coercive real part only above alpha = 5/3
    for (alpha, stable) in [
        (1.2, false),
        (1.6, false),
        (1.7, true),
        (1.8, true),
        (1.95, true),
    ] {
        let r = certify(third_order_scheme(FracOrder::new(alpha).unwrap()).unwrap());
        assert_eq!(!r.sign_change, stable, "alpha {alpha}: {r:?}");
    }
}

// keep away from odd integers, where |p - alpha/2| = 1/2 for two shifts
fn non_odd_alpha() -> impl Strategy<Value = f64> {
    (0.05f64..3.95).prop_filter("near an odd integer", |a| {
        ((a - 1.0).abs() > 0.05) && ((a - 3.0).abs() > 0.05)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dichotomy_for_random_orders(alpha in non_odd_alpha()) {
        let order = FracOrder::new(alpha).unwrap();
        let q = optimal_shift(order).unwrap();
        prop_assert_eq!(q, order.q() as i64);
        for p in [q - 1, q, q + 1] {
            let r = certify_stability(&combined_symbol(&Scheme::shifted(order, p as f64), 1.0), 2048).unwrap();
            prop_assert_eq!(r.sign_change, (p as f64 - alpha / 2.0).abs() > 0.5, "p = {}", p);
            if p == q {
                prop_assert!(r.c_coercivity >= coercivity_lower_bound(order, p as f64) - 1e-10);
            }
        }
    }

    #[test]
    fn scaling_of_combined_symbol(alpha in 1.05f64..1.95, h in 1e-3f64..1.0, k in -50.0f64..50.0) {
        let scheme = third_order_scheme(FracOrder::new(alpha).unwrap()).unwrap();
        let at_h = combined_symbol(&scheme, h).eval(k);
        let unit = combined_symbol(&scheme, 1.0).eval(h * k) * h.powf(-alpha);
        prop_assert!((at_h - unit).norm() <= 1e-12 * unit.norm().max(1e-300));
    }
}
