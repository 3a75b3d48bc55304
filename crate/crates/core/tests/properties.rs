mod common;

use common::*;
use proptest::prelude::*;
use quad_core::associate::{associate_value, derive_weights};
use quad_core::expr::parse;
use quad_core::{
    degree_probe, order_string, Builtin, Expr, Integrand, Precision, Real, Rule, RuleMap,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn derivative_matches_central_difference((e, _) in poly_tree(), x in -1.0f64..1.0) {
        prop_assert!(check_derivative(&e, x).is_ok(), "{:?}", check_derivative(&e, x));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn print_parse_round_trip((e, _) in poly_tree()) {
        prop_assert_eq!(parse(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn print_parse_round_trip_transcendental(e in smooth_tree()) {
        prop_assert_eq!(parse(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn precision_256_and_512_agree(e in smooth_tree(), x in -1.0f64..1.0) {
        let lo = Precision::new(256).unwrap();
        let hi = Precision::new(512).unwrap();
        let v_lo = e.eval(&real(x, lo), lo).unwrap();
        let v_hi = e.eval(&real(x, hi), hi).unwrap();
        let diff = (&v_lo - &v_hi).abs();
        let bound = Real::from_i64(1, hi) / Real::from_i64(2, hi).powi(250)
            * (v_hi.abs() + Real::from_i64(1, hi));
        prop_assert!(diff <= bound, "{e} at {x}: {v_lo} vs {v_hi}");
    }

    #[test]
    fn monomials_exact_to_metadata_degree(rule_idx in 0usize..7, bits in prop::sample::select(vec![53u32, 128, 256])) {
        let rule = Rule::ALL[rule_idx];
        let prec = Precision::new(bits).unwrap();
        for k in 0..=rule.meta().degree {
            prop_assert!(check_monomial(rule, k, prec).is_ok(), "{:?}", check_monomial(rule, k, prec));
        }
    }

    #[test]
    fn scaled_denominators_give_same_weights(d1 in 1u64..5000, d2 in 1u64..5000, k in 1u64..=10) {
        prop_assert_eq!(derive_weights(k * d1, k * d2), derive_weights(d1, d2));
    }

    #[test]
    fn associate_matches_unreduced_form(x in -1e3f64..1e3, y in -1e3f64..1e3, pair in 0usize..3) {
        let (d1, d2) = [(2u64, 2u64), (24, 12), (1920, 2880)][pair];
        let p = Precision::EXTENDED;
        let (xr, yr) = (real(x, p), real(y, p));
        let v = associate_value(&xr, &yr, derive_weights(d1, d2));
        let unreduced = (Real::from_i64(d1 as i64, p) * xr.clone() + Real::from_i64(d2 as i64, p) * yr.clone())
            / Real::from_i64((d1 + d2) as i64, p);
        let tol = Real::from_i64(8, p) * xr.abs().max(&yr.abs()).ulp();
        prop_assert!((&v - &unreduced).abs() <= tol);
        prop_assert!(xr.min(&yr) <= &v && &v <= xr.max(&yr));
    }

    #[test]
    fn order_string_shift_invariant(values in prop::collection::vec(-100i64..100, 7), shift in -1000i64..1000) {
        let p = Precision::DOUBLE;
        let base: RuleMap<Real> = Rule::ALL.iter().zip(&values).map(|(r, v)| (*r, Real::from_i64(*v, p))).collect();
        let shifted: RuleMap<Real> = base.iter().map(|(r, v)| (*r, v + &Real::from_i64(shift, p))).collect();
        prop_assert_eq!(order_string(&base), order_string(&shifted));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn companion_brackets_contain_associate_and_integral(p in poly()) {
        prop_assert!(check_containment(&p, &[1, 2, 4]).is_ok(), "{:?}", check_containment(&p, &[1, 2, 4]));
    }

    #[test]
    fn simpson_direct_formula_agrees(p in poly()) {
        let f = p.integrand();
        prop_assert!(check_simpson_identity(&f, P).is_ok(), "{:?}", check_simpson_identity(&f, P));
    }

    #[test]
    fn composite_simpson_is_mean_of_midpoint_and_trapezoid(p in poly(), n in 1usize..40) {
        let f = p.integrand();
        prop_assert!(check_commutation(&f, n, P).is_ok(), "{:?}", check_commutation(&f, n, P));
    }
}

#[test]
fn commutation_on_builtins() {
    for b in Builtin::ALL {
        let f = b.integrand();
        for n in [1, 2, 3, 4, 8, 16, 100, 1024] {
            for prec in [P, Precision::EXTENDED] {
                check_commutation(&f, n, prec).unwrap();
            }
        }
    }
}

#[test]
fn probe_never_below_metadata_degree() {
    for rule in Rule::ALL {
        assert!(
            rational_degree_ok(rule),
            "{rule}: {}",
            degree_probe(rule, 8)
        );
    }
}

#[test]
fn simpson_identity_on_builtins() {
    for b in Builtin::ALL {
        for prec in [P, Precision::EXTENDED] {
            check_simpson_identity(&b.integrand(), prec).unwrap();
        }
    }
}

#[test]
fn constant_derivative_is_zero() {
    let e = Expr::int(7);
    assert_eq!(e.derivative(), Expr::int(0));
    let f = Integrand::parse("7", "0", "1").unwrap();
    assert_eq!(*f.derivative(3), Expr::int(0));
}
