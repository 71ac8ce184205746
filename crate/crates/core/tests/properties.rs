//! Randomized invariants across modules.

mod common;

use common::*;
use edsval::curves::{CurvePoint, Transformation, WeierstrassModel};
use edsval::divpoly::{check_eds_identities, eds, multiple_via_divpoly, EdsSequence};
use edsval::formal::{mult_series, s_eval, SParams};
use edsval::heights::quadraticity_gap;
use edsval::numbers::{rat, vp, ExtValuation, Rational};
use edsval::troublemaker::{troublemaker, troublemaker_variant, within_eighth, VARIANTS};
use proptest::prelude::*;

/// A short model through `(x0, y0)`: `B = y0² − x0³ − A·x0`.
fn curve_through(a: i64, x0: i64, y0: i64) -> Option<(WeierstrassModel<Rational>, CurvePoint<Rational>)> {
    let b = y0 * y0 - x0 * x0 * x0 - a * x0;
    let e = WeierstrassModel::new([rat(0), rat(0), rat(0), rat(a), rat(b)]).ok()?;
    let p = e.point(rat(x0), rat(y0)).ok()?;
    Some((e, p))
}

fn small_rat() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=3).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

fn scale() -> impl Strategy<Value = Rational> {
    prop_oneof![Just(rat(1)), Just(rat(-1)), Just(rat(2)), Just(rat(3)), Just(Rational::new(1.into(), 2.into()))]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn change_of_model_shifts_valuations_by_a_square_law(
        u in scale(), r in small_rat(), s in small_rat(), t in small_rat(),
    ) {
        let (e, p) = ex1();
        let tr = Transformation::new(u.clone(), r, s, t).unwrap();
        let e2 = e.transform(&tr).unwrap();
        let p2 = e.transform_point(&p, &tr).unwrap();
        prop_assert!(e2.contains(&p2));
        let ratio = e.discriminant() / e2.discriminant();
        prop_assert_eq!(ratio, u.pow(12));
        let q = e.scalar_mul(&p, 3).unwrap();
        let sum2 = e2.add(&p2, &e.transform_point(&q, &tr).unwrap()).unwrap();
        prop_assert_eq!(sum2, e.transform_point(&e.scalar_mul(&p, 4).unwrap(), &tr).unwrap());
        for prime in [2u64, 3, 7] {
            let v1 = eds(&e, &p, 12).unwrap().valuations(prime).unwrap();
            let v2 = eds(&e2, &p2, 12).unwrap().valuations(prime).unwrap();
            let vu = vp(&u, prime).unwrap().finite().unwrap();
            for n in 1..=12i64 {
                let (ExtValuation::Finite(a), ExtValuation::Finite(b)) = (v1[n as usize - 1], v2[n as usize - 1]) else {
                    continue;
                };
                prop_assert_eq!(a - b, (n * n - 1) * vu);
            }
        }
    }

    #[test]
    fn eds_identities_hold_and_mutations_break_them(a in -8i64..=8, x0 in -4i64..=6, y0 in 1i64..=7, k in 1usize..=8) {
        let Some((e, p)) = curve_through(a, x0, y0) else { return Ok(()); };
        let seq = eds(&e, &p, 9).unwrap();
        prop_assert!(check_eds_identities(&seq, 9).unwrap().holds());
        if seq.terms().iter().all(|w| *w != rat(0)) {
            let mut terms = seq.terms().to_vec();
            terms[k] += rat(1);
            let bad = EdsSequence::from_terms(terms).unwrap();
            prop_assert!(!check_eds_identities(&bad, 9).unwrap().holds());
        }
    }

    #[test]
    fn division_polynomials_give_multiples(a in -8i64..=8, x0 in -4i64..=6, y0 in 1i64..=7, n in 1i64..=7) {
        let Some((e, p)) = curve_through(a, x0, y0) else { return Ok(()); };
        let direct = e.scalar_mul(&p, n).unwrap();
        match multiple_via_divpoly(&e, &p, n) {
            Ok(q) => prop_assert_eq!(q, direct),
            Err(_) => prop_assert!(direct.is_identity()),
        }
    }

    #[test]
    fn group_law_is_associative(i in 1i64..=4, j in 1i64..=4) {
        let (e, p) = ex2();
        let (q, r) = (e.scalar_mul(&p, i).unwrap(), e.scalar_mul(&p, j).unwrap());
        let left = e.add(&e.add(&p, &q).unwrap(), &r).unwrap();
        let right = e.add(&p, &e.add(&q, &r).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn troublemaker_forms_agree(n in 0i64..=400, a in 0i64..=200, ell in 1i64..=200) {
        let a = a % ell;
        let v = troublemaker(n, a, ell).unwrap();
        for variant in VARIANTS {
            prop_assert_eq!(troublemaker_variant(n, a, ell, variant).unwrap(), rat(v));
        }
        prop_assert!(within_eighth(n, a, ell).unwrap());
        prop_assert_eq!(troublemaker(n, ell - a, ell).unwrap(), v);
    }

    #[test]
    fn s_sequence_log_bound_and_homogeneity(
        p in prop_oneof![Just(2u64), Just(3), Just(5), Just(7)],
        bk in 0u32..=2, d in 1u64..=12, h in 0u64..=3, s in 1i64..=5, w in 0i64..=4, n in 1u64..=5000,
    ) {
        let b = if bk == 0 { 1 } else { p.pow(bk) };
        let h = if b == 1 { 0 } else { h };
        let sp = SParams::new(p, b, d, h, ExtValuation::Finite(s), ExtValuation::Finite(w)).unwrap();
        let v = s_eval(&sp, n).unwrap().finite().unwrap() as f64;
        let (c0, c1) = sp.log_bound().unwrap().unwrap();
        prop_assert!(v <= c0 + c1 * (n as f64).ln() + 1e-9);
        let double = SParams::new(p, b, 2 * d, 2 * h, ExtValuation::Finite(2 * s), ExtValuation::Finite(2 * w)).unwrap();
        prop_assert_eq!(s_eval(&double, n).unwrap(), s_eval(&sp, n).unwrap().scale(2));
    }
}

#[test]
fn multiplication_series_compose() {
    let (e, _) = ex1();
    let two = mult_series(&e, 2, 8).unwrap();
    let three = mult_series(&e, 3, 8).unwrap();
    assert_eq!(two.compose(&three).unwrap(), mult_series(&e, 6, 8).unwrap());
    assert_eq!(mult_series(&e, 1, 8).unwrap(), edsval::formal::PowerSeries::variable(&rat(0), 8));
}

#[test]
fn canonical_height_is_quadratic() {
    let (e, p) = ex1();
    assert!(quadraticity_gap(&e, &p, 3, 1e-4).unwrap() <= 0.0);
}
