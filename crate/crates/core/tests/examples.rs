//! The five worked examples: direct valuations against the printed
//! sequences, then fitted or measured closed forms against direct values.

mod common;

use common::*;
use edsval::curves::CurvePoint;
use edsval::divpoly::eds;
use edsval::numbers::{ExtValuation, Padic};
use edsval::reduction::{
    check_kernel_index, fit_closed_form, kernel_multiple_valuations, verify, verify_valuations, ReductionType,
};

#[test]
fn first_example_direct_and_predicted() {
    let (e, p) = ex1();
    let seq = eds(&e, &p, 55).unwrap();
    assert_eq!(seq.valuations(2).unwrap()[..31], fin(&EX1_V2)[..]);
    assert_eq!(seq.valuations(3).unwrap(), fin(&EX1_V3));
    assert_eq!(seq.valuations(7).unwrap()[..54], fin(&EX1_V7)[..]);
    for (prime, n) in [(2, 31), (3, 55), (7, 54)] {
        let r = verify(&e, &p, prime, n, None).unwrap();
        assert!(r.verified(), "p = {prime}: {:?}", r.mismatches);
    }
}

#[test]
fn first_example_parameters() {
    let (e, p) = ex1();
    let r = verify(&e, &p, 2, 31, None).unwrap();
    let q = &r.params;
    assert_eq!((q.n_p, q.a_p, q.ell_p, q.b_p, q.h_p), (6, 4, 8, 2, 0));
    assert_eq!((q.s_p, q.w_p), (ExtValuation::Finite(1), ExtValuation::Finite(1)));
    let r3 = verify(&e, &p, 3, 20, None).unwrap();
    assert_eq!((r3.params.n_p, r3.class.reduction), (5, ReductionType::Good));
}

#[test]
fn second_example_both_primes() {
    let (e, p) = ex2();
    let seq = eds(&e, &p, 48).unwrap();
    let v2 = seq.valuations(2).unwrap();
    let v5 = seq.valuations(5).unwrap();
    assert_eq!(v2, fin(&EX2_V2));
    assert_eq!(v5[..32], fin(&EX2_V5)[..]);
    // fit on n <= 24, check to 48
    let r2 = verify_valuations(&e, &p, 2, v2, None).unwrap();
    assert!(r2.verified(), "{:?}", r2.mismatches);
    assert_eq!((r2.params.d, r2.params.n_p), (3, 3));
    assert_eq!(check_kernel_index(&r2.params), Some(true));
    let r5 = verify(&e, &p, 5, 32, None).unwrap();
    assert!(r5.verified());
    assert_eq!((r5.params.n_p, r5.params.b_p), (1, 5));
}

#[test]
fn third_example_two_torsion_pattern() {
    let (e, p) = ex3();
    let v = eds(&e, &p, 15).unwrap().valuations(2).unwrap();
    let expect: Vec<ExtValuation> = (1..=15i64)
        .map(|n| if n % 2 == 0 { ExtValuation::Infinite } else { ExtValuation::Finite(1 - n * n) })
        .collect();
    assert_eq!(v, expect);
    assert!(verify(&e, &p, 2, 15, None).unwrap().verified());
}

#[test]
fn fourth_example_fitted_scale_two() {
    let (e, p) = ex4();
    let v = eds(&e, &p, 42).unwrap().valuations(7).unwrap();
    assert_eq!(v, fin(&EX4_V7));
    let r = verify_valuations(&e, &p, 7, v, None).unwrap();
    assert!(r.verified(), "{:?}", r.mismatches);
    let q = &r.params;
    assert_eq!(r.class.reduction, ReductionType::AdditivePotMult);
    assert_eq!((q.d, q.a_p, q.ell_p, q.n_p), (2, 5, 10, 4));
}

#[test]
fn fifth_example_two_adic() {
    let (e, p) = ex5(PADIC_DIGITS);
    let v = eds(&e, &p, 25).unwrap().valuations(2).unwrap();
    assert_eq!(v, fin(&EX5_V2));
    let params = fit_closed_form(&v, &e, &p, 2).unwrap();
    assert_eq!((params.d, params.b_p), (12, 4));
    let r = verify_valuations(&e, &p, 2, v, None).unwrap();
    assert!(r.verified(), "{:?}", r.mismatches);
}

#[test]
fn kernel_valuations_follow_s_for_three_steps() {
    let cases: Vec<(edsval::curves::WeierstrassModel<edsval::numbers::Rational>, CurvePoint<_>, u64, i64)> = vec![
        (ex1().0, ex1().1, 2, 6),
        (ex1().0, ex1().1, 3, 5),
        (ex1().0, ex1().1, 7, 6),
        (ex2().0, ex2().1, 5, 1),
        (ex3().0, ex3().1, 2, 1),
    ];
    for (e, pt, prime, n_p) in cases {
        let ep = e.to_padic(prime, 64).unwrap();
        let z = ep.scalar_mul(&pt.to_padic(prime, 64).unwrap(), n_p).unwrap();
        let r = kernel_multiple_valuations(&ep, &z, prime, 3).unwrap();
        assert_eq!(r.direct, r.predicted, "p = {prime}");
    }
}

#[test]
fn padic_and_rational_runs_agree() {
    let (e, p) = ex1();
    let exact = eds(&e, &p, 20).unwrap().valuations(7).unwrap();
    let ep = e.to_padic(7, 64).unwrap();
    let pp = p.to_padic(7, 64).unwrap();
    assert_eq!(eds(&ep, &pp, 20).unwrap().valuations(7).unwrap(), exact);
    let _: Padic = ep.discriminant();
}
