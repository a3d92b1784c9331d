//! Behavior of the expression kernel: normalization, calculus, text
//! round-trips, and the probabilistic zero test.

use deltaclaw_core::expr::{
    depends_on, differentiate, evaluate, exprs_equal, is_zero, ode_shift, parse, shift,
    substitute, EvalPoint, Expr, LatticeVar, Value, ZeroTestConfig,
};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

fn cfg() -> ZeroTestConfig {
    ZeroTestConfig::default()
}

fn p(src: &str) -> Expr {
    parse(src).expect(src)
}

#[test]
fn construction_collects_like_terms() {
    let e = Expr::u(0, 0) + Expr::u(1, 0) - Expr::u(1, 0);
    assert_eq!(e, Expr::u(0, 0));

    let e = Expr::int(2) * Expr::u(0, 0) + Expr::int(3) * Expr::u(0, 0);
    assert_eq!(e, Expr::int(5) * Expr::u(0, 0));

    let e = Expr::u(0, 0) * Expr::u(0, 0);
    assert_eq!(e, Expr::pow(Expr::u(0, 0), 2));

    let e = Expr::u(0, 0) * Expr::pow(Expr::u(0, 0), -1);
    assert_eq!(e, Expr::one());
}

#[test]
fn construction_fuses_sign_and_power_factors() {
    let e = Expr::parity(1, 0, 0) * Expr::parity(1, 1, 0);
    assert_eq!(e, Expr::parity(0, 1, 0));

    let half = BigRational::new(1.into(), 2.into());
    let e = Expr::pow_lin(half, 0, 1, 0);
    assert_eq!(e, Expr::pow_lin(BigRational::from_integer(2.into()), 0, -1, 0));

    let two = BigRational::from_integer(2.into());
    let e = Expr::pow_lin(two.clone(), 1, 0, 0) * Expr::pow_lin(two.clone(), -1, 1, 0);
    assert_eq!(e, Expr::pow_lin(two, 0, 1, 0));

    // (-1)^(2m) folds away entirely.
    assert_eq!(Expr::parity(2, 0, 0), Expr::one());
    assert_eq!(Expr::parity(0, 0, 3), Expr::int(-1));
}

#[test]
fn binomial_identity_is_structural() {
    let lhs = Expr::pow(Expr::u(0, 0) + Expr::u(0, 1), 2);
    let rhs = Expr::pow(Expr::u(0, 0), 2)
        + Expr::int(2) * Expr::u(0, 0) * Expr::u(0, 1)
        + Expr::pow(Expr::u(0, 1), 2);
    // Powers of sums are not expanded, so the two differ structurally...
    assert_ne!(lhs, rhs);
    // ...but the zero test sees through it, exactly (no ln/sqrt involved).
    assert!(exprs_equal(&lhs, &rhs, &cfg()).unwrap());
}

#[test]
fn shift_moves_everything_in_lockstep() {
    let e = p("u[0,0]*m + parity(1,1,0) + 2^(-n)");
    let s = shift(&e, 1, 2);
    let expected = p("u[1,2]*(m+1) + parity(1,1,1) + 2^(-n-2)");
    assert_eq!(s, expected);

    // Shifting is invertible.
    assert_eq!(shift(&s, -1, -2), e);
}

#[test]
fn ode_shift_advances_index_and_symbol_together() {
    let e = p("u[0,0]*u[2,0] + n");
    assert_eq!(ode_shift(&e, 3), p("u[3,0]*u[5,0] + n + 3"));
    assert_eq!(ode_shift(&ode_shift(&e, 2), -2), e);
}

#[test]
fn differentiation_rules() {
    let u00 = LatticeVar::u(0, 0);
    let d = differentiate(&p("u[0,0]^3"), u00);
    assert_eq!(d, p("3*u[0,0]^2"));

    let d = differentiate(&p("u[0,0]*u[1,0]"), u00);
    assert_eq!(d, p("u[1,0]"));

    let d = differentiate(&p("ln(u[0,0]^2)"), u00);
    assert!(exprs_equal(&d, &p("2/u[0,0]"), &cfg()).unwrap());

    let d = differentiate(&p("sqrt(u[0,0])"), u00);
    let want = p("1/(2*sqrt(u[0,0]))");
    assert!(exprs_equal(&d, &want, &cfg()).unwrap());

    // No dependence, derivative is structurally zero.
    assert!(differentiate(&p("u[0,1] + m"), u00).is_zero_expr());
}

#[test]
fn substitution_rebuilds_canonically() {
    let e = p("u[0,0]^2 + u[0,0]*u[1,0]");
    let r = substitute(&e, LatticeVar::u(0, 0), &p("u[1,0]"));
    assert_eq!(r, p("2*u[1,0]^2"));
}

#[test]
fn parse_print_round_trip() {
    let cases = [
        "u[0,0]",
        "D[-1,2]",
        "u[0,0] + u[1,0]*u[0,1]",
        "-u[0,0] + 3/4*u[1,1]",
        "(u[0,0] - u[2,0])^-1",
        "alpha*u[1,0] - beta*u[0,1] + lambda",
        "parity(1,0,1)*u[0,0]",
        "2^(-n)*u[0,0] + 2^(m+n+1)",
        "ln(u[1,0] - u[0,1])",
        "sqrt(1 + u[0,0]^2)",
        "1/2*u[0,0]^2 - 1/(u[0,1] + 1)",
        "m*n + m^2 - n^2",
        "w - alpha*u[0,0]",
    ];
    for src in cases {
        let once = p(src);
        let printed = once.to_text();
        let twice = parse(&printed).unwrap_or_else(|e| panic!("reparse {printed:?}: {e}"));
        assert_eq!(once, twice, "round trip failed for {src} -> {printed}");
    }
}

#[test]
fn parse_rejects_malformed_input() {
    for bad in ["u[0]", "u[0,0", "1 +", "(u[0,0]", "x^y", "2^^3", "parity(1,0)", "$"] {
        assert!(parse(bad).is_err(), "expected parse failure for {bad:?}");
    }
}

#[test]
fn evaluation_is_exact_on_rational_input() {
    let e = p("2^(m+n) + parity(1,0,0)*u[0,0]");
    let mut at = EvalPoint::new(128);
    at.m = 3;
    at.n = -1;
    at.vars.insert(LatticeVar::u(0, 0), BigRational::new(1.into(), 3.into()));
    match evaluate(&e, &at).unwrap() {
        Value::Exact(r) => {
            // 2^2 + (-1)^3 * 1/3
            assert_eq!(r, BigRational::new(11.into(), 3.into()));
        }
        Value::Approx(_) => panic!("expected exact value"),
    }
}

#[test]
fn zero_test_exact_path() {
    let z = p("(u[0,0] + u[0,1])^2 - u[0,0]^2 - 2*u[0,0]*u[0,1] - u[0,1]^2");
    assert!(is_zero(&z, &cfg()).unwrap());
    assert!(!is_zero(&p("u[0,0] - u[0,1]"), &cfg()).unwrap());
    // Rational functions hit removable singularities and resample.
    assert!(!is_zero(&p("1/(u[0,0] - u[0,1])"), &cfg()).unwrap());
}

#[test]
fn zero_test_float_path() {
    let z = p("ln((1 + u[0,0]^2)*(1 + u[1,0]^2)) - ln(1 + u[0,0]^2) - ln(1 + u[1,0]^2)");
    assert!(is_zero(&z, &cfg()).unwrap(), "log identity should vanish");

    // sqrt(x^2) is |x|, not x, and samples take both signs.
    let not = p("sqrt(u[0,0]^2) - u[0,0]");
    assert!(!is_zero(&not, &cfg()).unwrap());

    let z = p("sqrt(1+u[0,0]^2)^2 - 1 - u[0,0]^2");
    assert!(is_zero(&z, &cfg()).unwrap());
}

#[test]
fn zero_test_is_deterministic() {
    let e = p("ln(1 + u[0,0]^2) - ln(2)");
    let a = is_zero(&e, &ZeroTestConfig::with_seed(7)).unwrap();
    let b = is_zero(&e, &ZeroTestConfig::with_seed(7)).unwrap();
    assert_eq!(a, b);
    assert!(!a);
}

#[test]
fn dependence_is_semantic_not_syntactic() {
    // u10 appears syntactically (products are not distributed over sums,
    // so it does not cancel structurally) but the dependence is spurious.
    let e = p("u[0,0]*(u[1,0] + 1) - u[0,0]*u[1,0]");
    assert!(e.lattice_vars().contains(&LatticeVar::u(1, 0)));
    assert!(!depends_on(&e, LatticeVar::u(1, 0), &cfg()).unwrap());
    assert!(depends_on(&e, LatticeVar::u(0, 0), &cfg()).unwrap());
    assert!(exprs_equal(&e, &Expr::u(0, 0), &cfg()).unwrap());
}

#[test]
fn powlin_survives_a_round_trip_through_text_and_eval() {
    let e = p("2^(2-n)");
    let mut at = EvalPoint::new(128);
    at.n = 5;
    match evaluate(&e, &at).unwrap() {
        Value::Exact(r) => assert_eq!(r.to_f64().unwrap(), 0.125),
        _ => panic!("expected exact"),
    }
    assert_eq!(parse(&e.to_text()).unwrap(), e);
}
