use proptest::prelude::*;
use qsnm_core::expr::{parse, simplify, Expr, Tape};

fn names() -> Vec<String> {
    vec!["x".into(), "y".into()]
}

/// Expressions that are finite and smooth on `[-1, 1]^2`.
fn smooth_expr() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("x".to_string()),
        Just("y".to_string()),
        (-3.0..3.0f64).prop_map(|c| format!("({c:.4})")),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a} + {b}")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) - ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})*({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})/(1.5 + cos({b}))")),
            inner.clone().prop_map(|a| format!("sin({a})")),
            inner.clone().prop_map(|a| format!("exp(0.2*({a}))")),
            inner.clone().prop_map(|a| format!("sqrt(1 + ({a})^2)")),
            inner.prop_map(|a| format!("ln(2 + sin({a}))")),
        ]
    })
}

fn point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, 2)
}

fn eval(e: &Expr, p: &[f64]) -> f64 {
    Tape::compile(std::slice::from_ref(e)).evaluate(p).unwrap()[0]
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mixed_partials_commute(s in smooth_expr(), p in point()) {
        let e = parse(&s, &names()).unwrap();
        let xy = e.differentiate(0).differentiate(1);
        let yx = e.differentiate(1).differentiate(0);
        prop_assert!(close(eval(&xy, &p), eval(&yx, &p), 1e-9));
    }

    #[test]
    fn derivative_is_linear(a in smooth_expr(), b in smooth_expr(), c in -2.0..2.0f64, p in point()) {
        let (ea, eb) = (parse(&a, &names()).unwrap(), parse(&b, &names()).unwrap());
        let combo = Expr::constant(c) * ea.clone() + eb.clone();
        let lhs = eval(&combo.differentiate(0), &p);
        let rhs = c * eval(&ea.differentiate(0), &p) + eval(&eb.differentiate(0), &p);
        prop_assert!(close(lhs, rhs, 1e-10));
    }

    #[test]
    fn derivative_matches_central_difference(s in smooth_expr(), p in point(), k in 0usize..2) {
        let e = parse(&s, &names()).unwrap();
        let h = 1e-5;
        let (mut up, mut down) = (p.clone(), p.clone());
        up[k] += h;
        down[k] -= h;
        let fd = (eval(&e, &up) - eval(&e, &down)) / (2.0 * h);
        let sym = eval(&e.differentiate(k), &p);
        prop_assert!((sym - fd).abs() <= 1e-6 * (1.0 + sym.abs()), "{s}: {sym} vs {fd}");
    }

    #[test]
    fn simplify_preserves_value(s in smooth_expr(), p in point()) {
        let e = parse(&s, &names()).unwrap();
        prop_assert!(close(eval(&simplify(&e), &p), eval(&e, &p), 1e-12));
    }

    #[test]
    fn display_round_trips(s in smooth_expr(), p in point()) {
        let e = parse(&s, &names()).unwrap();
        let again = parse(&e.display_with(&names()).to_string(), &names()).unwrap();
        prop_assert!(close(eval(&again, &p), eval(&e, &p), 1e-12));
    }
}
