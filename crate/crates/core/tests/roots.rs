//! The full root-of-characteristic corpus for the lattice potential KdV
//! equation in its sheared Kovalevskaya form: seven reference conservation
//! laws, their printed roots (up to a documented sign convention on the
//! parity-weighted rows), a higher-order conservation law equivalent to the
//! first, and recovery of a characteristic from densities.

use deltaclaw_core::claw::{
    characteristic_check, characteristic_from_claw, equivalent_roots, is_trivial, root,
    verify_claw, DensityPair, Equivalence, Root,
};
use deltaclaw_core::equations::{Equation, KovalevskayaPde};
use deltaclaw_core::expr::{is_zero, parse, Expr, Symbol, ZeroTestConfig};

fn e(src: &str) -> Expr {
    parse(src).expect("test expression must parse")
}

fn cfg() -> ZeroTestConfig {
    ZeroTestConfig::default()
}

/// Lattice potential KdV after the shear m̃ = m + n:
/// u[2,1] = u[0,0] + (β − α)/(u[1,0] − u[1,1]).
fn sheared() -> Equation {
    Equation::Kovalevskaya(
        KovalevskayaPde::new(
            2,
            1,
            e("u[0,0] + (beta - alpha)/(u[1,0] - u[1,1])"),
            Some(e("w + (beta - alpha)/(u[1,1] - u[1,0])")),
            vec![Symbol::Alpha, Symbol::Beta],
            &cfg(),
        )
        .unwrap(),
    )
}

/// Shorthand kept verbatim across the reference densities.
const B: &str = "(u[0,-1] + (beta-alpha)/(u[1,-1]-u[1,0]))";

fn table1() -> Vec<DensityPair> {
    let f5 = "-ln((beta-alpha)/(u[1,0]-u[1,1])) + ln(u[0,-1]-u[0,0]+(beta-alpha)/(u[1,-1]-u[1,0]))"
        .to_string();
    let g5 = "ln(u[1,-1]-u[1,0] + (beta-alpha)*(u[0,-2]-u[0,-1]+(beta-alpha)/(u[1,-2]-u[1,-1])-(beta-alpha)/(u[1,-1]-u[1,0]))^(-1))".to_string();
    let f6 = "-ln(u[0,0]-u[0,-1]+(beta-alpha)/(u[1,0]-u[1,1])) + ln((beta-alpha)/(u[1,-1]-u[1,0]))"
        .to_string();
    let g6 = "ln((beta-alpha)*(u[0,-2]-u[0,-1]+(beta-alpha)/(u[1,-2]-u[1,-1])-(beta-alpha)/(u[1,-1]-u[1,0]))^(-1))".to_string();
    let rows: Vec<(String, String)> = vec![
        (
            "parity(1,0,0)*(2*u[0,0]*(u[1,1]-u[1,0]) + alpha - beta)".into(),
            format!("parity(1,0,0)*(2*u[1,0]*{B} - alpha)"),
        ),
        (
            "(u[0,0]-u[1,0])*(u[0,0]*u[1,0]-alpha) - (u[0,0]-u[1,1])*(u[0,0]*u[1,1]-beta)".into(),
            format!("(u[1,0]-{B})*(u[1,0]*{B}-alpha)"),
        ),
        (
            "parity(1,0,0)*(u[0,0]*(u[1,1]-u[1,0])*(u[0,0]+u[1,0]+u[1,1]) + alpha*(u[0,0]+u[1,0]) - beta*(u[0,0]+u[1,1]))"
                .into(),
            format!("parity(1,0,0)*(u[1,0]+{B})*(u[1,0]*{B}-alpha)"),
        ),
        (
            "parity(1,0,1)*(2*u[0,0]^2*(u[1,0]^2-u[1,1]^2) + 4*u[0,0]*(beta*u[1,1]-alpha*u[1,0]) + alpha^2 - beta^2)"
                .into(),
            format!("parity(1,0,0)*(2*u[1,0]^2*{B}^2 - 4*alpha*u[1,0]*{B} + alpha^2)"),
        ),
        (f5.clone(), g5.clone()),
        (f6.clone(), g6.clone()),
        (
            format!("(m-n)*({f5}) + n*({f6})"),
            format!("(m-n+1)*({g5}) + n*({g6})"),
        ),
    ];
    rows.into_iter().map(|(f, g)| DensityPair::new(e(&f), e(&g))).collect()
}

/// Printed roots with ω-slots written as `D[0,j]`, together with the factor
/// relating them to the computed convention (`S_m`-anchored slots): the
/// parity-carrying rows come out negated, the others agree exactly.
fn table2() -> Vec<(Expr, i64)> {
    let q5 = "(beta-alpha)*(D[0,-1]-D[0,0])^(-2)*(u[1,0]-u[1,1]+(beta-alpha)/(D[0,-1]-D[0,0]))^(-1) - (beta-alpha)*(D[0,0]-D[0,1])^(-2)*(u[1,1]-u[1,2]+(beta-alpha)/(D[0,0]-D[0,1]))^(-1) + (D[0,0]-D[0,1])^(-1) - (D[0,-1]-D[0,0])^(-1)".to_string();
    let q6 = "(beta-alpha)*(D[0,0]-D[0,1])^(-2)*(u[1,1]-u[1,0]+(beta-alpha)/(D[0,0]-D[0,1]))^(-1) - (beta-alpha)*(D[0,-1]-D[0,0])^(-2)*(u[1,0]-u[1,-1]+(beta-alpha)/(D[0,-1]-D[0,0]))^(-1) + (D[0,-1]-D[0,0])^(-1) - (D[0,0]-D[0,1])^(-1)".to_string();
    let q7 = format!(
        "(beta-alpha)*(D[0,0]-D[0,1])^(-2)*((u[1,1]-u[1,2]+(beta-alpha)/(D[0,0]-D[0,1]))^(-1)+(u[1,1]-u[1,0]+(beta-alpha)/(D[0,0]-D[0,1]))^(-1)) + (m-n)*({q5}) + n*({q6}) + 2*(D[0,1]-D[0,0])^(-1)"
    );
    vec![
        (e("2*parity(1,0,1)*(u[1,1]-u[1,0])"), -1),
        (e("(u[1,1]-u[1,0])*(u[1,1]+u[1,0]-2*D[0,0]) + alpha - beta"), 1),
        (e("parity(1,0,0)*((u[1,0]-u[1,1])*(u[1,1]+u[1,0]+2*D[0,0]) + alpha - beta)"), -1),
        (e("4*parity(1,0,0)*(D[0,0]*(u[1,0]^2-u[1,1]^2) + alpha*u[1,1] - beta*u[1,0])"), -1),
        (e(&q5), 1),
        (e(&q6), 1),
        (e(&q7), 0), // factor determined by the row-7 report test below
    ]
}

fn assert_root_matches(got: &Root, printed: &Expr, factor: i64, row: usize) {
    let want = Expr::int(factor) * printed.clone();
    let resid = got.slots.clone() - want;
    assert!(
        is_zero(&resid, &cfg()).unwrap(),
        "row {row}: computed root does not equal {factor} x printed root;\n got {}",
        got.slots
    );
}

#[test]
fn table1_all_rows_verify() {
    let eq = sheared();
    for (i, pair) in table1().iter().enumerate() {
        assert!(
            verify_claw(pair, &eq, &cfg()).unwrap(),
            "reference conservation law {} failed to verify",
            i + 1
        );
    }
}

#[test]
fn table1_rows_are_nontrivial() {
    let eq = sheared();
    for (i, pair) in table1().iter().enumerate() {
        assert!(
            !is_trivial(pair, &eq, &cfg()).unwrap(),
            "reference conservation law {} should be nontrivial",
            i + 1
        );
    }
}

#[test]
fn table2_roots_match_printed_up_to_documented_sign() {
    let eq = sheared();
    let pairs = table1();
    let printed = table2();
    for row in 0..6 {
        let got = root(&pairs[row], &eq).unwrap();
        assert_root_matches(&got, &printed[row].0, printed[row].1, row + 1);
    }
}

#[test]
fn table2_row7_root_report() {
    let eq = sheared();
    let pairs = table1();
    let printed = table2();
    let got = root(&pairs[6], &eq).unwrap();
    // Determine the exact relation to the printed row-7 root.
    let mut matched = None;
    for factor in [1i64, -1] {
        let resid = got.slots.clone() - Expr::int(factor) * printed[6].0.clone();
        if is_zero(&resid, &cfg()).unwrap() {
            matched = Some(factor);
            break;
        }
    }
    match matched {
        Some(f) => assert_eq!(f, 1, "row 7 computed root equals {f} x printed"),
        None => {
            // Fall back to reporting the relation through equivalence.
            let verdict = equivalent_roots(&got.z, &zform(&printed[6].0), 2, &cfg()).unwrap();
            panic!("row 7 root does not match printed root exactly; equivalence verdict: {verdict:?}\n got {}", got.slots);
        }
    }
}

/// Substitutes printed ω-slots by their defining expressions (for
/// equivalence comparisons, which operate on initial-data forms).
fn zform(slotted: &Expr) -> Expr {
    use deltaclaw_core::expr::{shift, substitute_where, Family};
    let omega = e("u[0,0] + (beta - alpha)/(u[1,0] - u[1,1])");
    substitute_where(slotted, Family::Delta, &|_, _| true, &|_, dn| shift(&omega, 0, dn))
}

#[test]
fn higher_order_law_verifies_and_reduces_to_row_one() {
    let eq = sheared();
    let f = "parity(1,0,1)*(2*u[1,1]*(u[0,1]+(beta-alpha)/(u[1,1]-u[1,2]))-beta) + parity(1,0,1)*(alpha-2*u[1,1]*(u[0,0]+(beta-alpha)/(u[1,0]-u[1,1])))";
    let y = "(u[0,0]-u[0,-1]-(beta-alpha)/(u[1,-1]-u[1,0])+(beta-alpha)/(u[1,0]-u[1,1]))";
    let a = "(u[0,0]+(beta-alpha)/(u[1,0]-u[1,1]))";
    let b = "(u[0,-1]+(beta-alpha)/(u[1,-1]-u[1,0]))";
    let g = format!(
        "(2*u[1,0]*parity(1,0,1)/{y})*({a}^2-{a}*{b}) + (parity(1,0,1)/{y})*(alpha*{a}+alpha*{b}-2*beta*{a})"
    );
    let pair = DensityPair::new(e(f), e(&g));
    assert!(verify_claw(&pair, &eq, &cfg()).unwrap(), "higher-order law failed to verify");

    let got = root(&pair, &eq).unwrap();
    let expect = e("2*parity(1,0,0)*(u[1,1]-u[1,0])");
    assert!(
        is_zero(&(got.slots.clone() - expect), &cfg()).unwrap(),
        "higher-order root mismatch; got {}",
        got.slots
    );

    // Equal on the nose to the computed first-row root: factor +1, no shift.
    let row1 = root(&table1()[0], &sheared()).unwrap();
    match equivalent_roots(&got.z, &row1.z, 2, &cfg()).unwrap() {
        Equivalence::Equivalent { factor, shift } => {
            assert_eq!(shift, (0, 0));
            assert_eq!(factor, num_rational::BigRational::from(num_bigint::BigInt::from(1)));
        }
        Equivalence::Distinct => panic!("higher-order law should be equivalent to row 1"),
    }
    // Against the reference-table form of row 1 the factor is −1 (that row
    // carries the documented sign flip).
    match equivalent_roots(&got.z, &zform(&table2()[0].0), 2, &cfg()).unwrap() {
        Equivalence::Equivalent { factor, shift } => {
            assert_eq!(shift, (0, 0));
            assert_eq!(factor, num_rational::BigRational::from(num_bigint::BigInt::from(-1)));
        }
        Equivalence::Distinct => panic!("higher-order law should be equivalent to reference row 1"),
    }
}

#[test]
fn characteristic_recovered_from_row4_densities() {
    let eq = sheared();
    let pair = &table1()[3];
    let q = characteristic_from_claw(pair, &eq, &cfg()).unwrap();
    assert!(
        characteristic_check(&q, &eq, &cfg()).unwrap(),
        "recovered expression fails the characteristic identity"
    );
    // Reference form: slots written via their defining expression, the
    // defining-expression placeholder as D[0,0].
    let w00 = "(u[0,0]+(beta-alpha)/(u[1,0]-u[1,1]))";
    let printed = e(&format!(
        "2*parity(1,0,1)*((D[0,0]+2*{w00})*(u[1,0]^2-u[1,1]^2)+2*(alpha*u[1,1]-beta*u[1,0]))"
    ));
    let mut matched = None;
    for factor in [1i64, -1] {
        if is_zero(&(q.clone() - Expr::int(factor) * printed.clone()), &cfg()).unwrap() {
            matched = Some(factor);
            break;
        }
    }
    assert_eq!(
        matched,
        Some(1),
        "characteristic should equal the reference form exactly; got {q}"
    );
}

#[test]
fn roots_of_trivial_laws_vanish_and_table_rows_are_pairwise_distinct() {
    let eq = sheared();
    // Distinctness of the first four rational rows (pairwise inequivalent).
    let pairs = table1();
    let roots: Vec<Root> = pairs[..4].iter().map(|p| root(p, &eq).unwrap()).collect();
    for i in 0..4 {
        for j in (i + 1)..4 {
            assert_eq!(
                equivalent_roots(&roots[i].z, &roots[j].z, 2, &cfg()).unwrap(),
                Equivalence::Distinct,
                "rows {} and {} unexpectedly equivalent",
                i + 1,
                j + 1
            );
        }
    }
}
