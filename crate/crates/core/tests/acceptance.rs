//! Acceptance suite: one PASS/FAIL line per criterion, with wall-clock
//! budgets. Runs without the libtest harness so the lines always print.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use edsval::curves::{CurvePoint, WeierstrassModel};
use edsval::divpoly::{check_eds_identities, eds, rank7_closed_form, rank7_torsion_eds, EdsSequence};
use edsval::formal::mult_series;
use edsval::heights::{
    check_denominator_bounds, curve_heights, integral_multiples, quadraticity_gap, INTEGRAL_MULTIPLE_COEFFICIENT,
};
use edsval::numbers::{rat, ExtValuation, Rational, Scalar};
use edsval::reduction::{kernel_multiple_valuations, square_one_pairs, verify, verify_valuations, ReductionType};
use edsval::troublemaker::{check_properties, table1, table1_diff};

type Outcome = Result<String, String>;

fn ensure(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn criterion_1() -> Outcome {
    let rows = table1();
    let cells: usize = rows.iter().map(|r| r.values.len()).sum();
    ensure(cells == 182, format!("{cells} cells"))?;
    let diff = table1_diff(&rows);
    ensure(diff.is_empty(), format!("{} cells differ, first {:?}", diff.len(), diff.first()))?;
    Ok("182 entries exact".into())
}

fn criterion_2() -> Outcome {
    let (e, p) = ex1();
    let seq = eds(&e, &p, 55).map_err(e2s)?;
    ensure(seq.valuations(2).map_err(e2s)?[..31] == fin(&EX1_V2)[..], "v2 differs")?;
    ensure(seq.valuations(3).map_err(e2s)? == fin(&EX1_V3), "v3 differs")?;
    ensure(seq.valuations(7).map_err(e2s)?[..54] == fin(&EX1_V7)[..], "v7 differs")?;
    for (prime, n) in [(2, 31), (3, 55), (7, 54)] {
        let r = verify(&e, &p, prime, n, None).map_err(e2s)?;
        ensure(r.verified(), format!("prediction at {prime}: {:?}", r.mismatches))?;
    }
    Ok("v2 n<=31, v3 n<=55, v7 n<=54 direct and predicted".into())
}

fn criterion_3() -> Outcome {
    let (e, p) = ex2();
    let seq = eds(&e, &p, 48).map_err(e2s)?;
    let v2 = seq.valuations(2).map_err(e2s)?;
    let v5 = seq.valuations(5).map_err(e2s)?;
    ensure(v2 == fin(&EX2_V2), "v2 differs")?;
    ensure(v5[..32] == fin(&EX2_V5)[..], "v5 differs")?;
    for (prime, v) in [(2, v2), (5, v5)] {
        let r = verify_valuations(&e, &p, prime, v, None).map_err(e2s)?;
        ensure(r.fit_window == 24, format!("fit window {}", r.fit_window))?;
        ensure(r.verified(), format!("p = {prime}: {:?}", r.mismatches))?;
    }
    Ok("v2 and v5 to n = 48, fit window 24".into())
}

fn criterion_4() -> Outcome {
    let (e, p) = ex3();
    let v = eds(&e, &p, 15).map_err(e2s)?.valuations(2).map_err(e2s)?;
    for (i, got) in v.iter().enumerate() {
        let n = i as i64 + 1;
        let want = if n % 2 == 0 { ExtValuation::Infinite } else { ExtValuation::Finite(1 - n * n) };
        ensure(*got == want, format!("n = {n}: {got:?}"))?;
    }
    let r = verify(&e, &p, 2, 15, None).map_err(e2s)?;
    ensure(r.verified(), "prediction differs")?;
    Ok("-n^2 + (inf if 2|n else 1), n <= 15".into())
}

fn criterion_5() -> Outcome {
    let (e, p) = ex4();
    let v = eds(&e, &p, 42).map_err(e2s)?.valuations(7).map_err(e2s)?;
    ensure(v == fin(&EX4_V7), "v7 differs")?;
    let r = verify_valuations(&e, &p, 7, v, None).map_err(e2s)?;
    ensure(r.verified(), format!("{:?}", r.mismatches))?;
    let q = &r.params;
    ensure(r.class.reduction == ReductionType::AdditivePotMult, format!("{:?}", r.class.reduction))?;
    ensure((q.d, q.a_p, q.ell_p) == (2, 5, 10), format!("d = {}, R_n({}, {})", q.d, q.a_p, q.ell_p))?;
    Ok("v7 to 1984, fitted d = 2 with R_n(5,10)".into())
}

fn criterion_6() -> Outcome {
    let (e, p) = ex5(PADIC_DIGITS);
    let v = eds(&e, &p, 25).map_err(e2s)?.valuations(2).map_err(e2s)?;
    ensure(v == fin(&EX5_V2), format!("{v:?}"))?;
    Ok(format!("v2 n <= 25 at {PADIC_DIGITS} 2-adic digits"))
}

fn criterion_7() -> Outcome {
    let rep = check_properties(40, 60).map_err(e2s)?;
    ensure(rep.failures.is_empty(), format!("{} failures, first {:?}", rep.failures.len(), rep.failures.first()))?;
    let (n, a, ell) = rep.single_floor_witness.ok_or("no single-floor counterexample for l in [8, 40]")?;
    Ok(format!("{} checks; single-floor fails at n={n}, a={a}, l={ell}", rep.checked))
}

fn coeffs(model: &WeierstrassModel<Rational>, m: i64, degree: usize) -> Result<Vec<Rational>, String> {
    Ok(mult_series(model, m, degree).map_err(e2s)?.coeffs().to_vec())
}

fn criterion_8() -> Outcome {
    let r = |v: &[i64]| v.iter().map(|&x| rat(x)).collect::<Vec<_>>();
    let five = coeffs(&ex2().0, 5, 9)?;
    let want5 = r(&[5, 0, 0, 0, -3083808, 0, -33480, 0, 1574818510720]);
    ensure(five[five.len() - 9..] == want5[..], format!("[5]T = {five:?}"))?;
    let two = coeffs(&ex3().0, 2, 4)?;
    ensure(two[two.len() - 4..] == r(&[2, -1, -2, -6])[..], format!("[2]T = {two:?}"))?;
    // The kernel of reduction is reached by [n_P]P only at good or
    // multiplicative primes.
    let curves = [ex1(), ex2(), ex3(), ex4()];
    let mut checked = 0;
    for (i, (e, pt)) in curves.iter().enumerate() {
        let mut here = 0;
        for prime in [2u64, 3, 5, 7, 11, 13] {
            let r = verify(e, pt, prime, 12, None).map_err(e2s)?;
            if !matches!(r.class.reduction, ReductionType::Good | ReductionType::Multiplicative) {
                continue;
            }
            let ep = e.to_padic(prime, 64).map_err(e2s)?;
            let z = ep.scalar_mul(&pt.to_padic(prime, 64).map_err(e2s)?, r.params.n_p as i64).map_err(e2s)?;
            let k = kernel_multiple_valuations(&ep, &z, prime, 3).map_err(e2s)?;
            ensure(k.direct == k.predicted, format!("ex{} p = {prime}: {:?} vs {:?}", i + 1, k.direct, k.predicted))?;
            here += 1;
        }
        ensure(here > 0, format!("ex{} has no usable prime", i + 1))?;
        checked += here;
    }
    Ok(format!("[5]T, [2]T exact; kernel multiples k <= 3 at {checked} (curve, prime) pairs"))
}

fn identities_and_mutation<F: Scalar>(seq: &EdsSequence<F>, max_index: usize, label: &str) -> Result<usize, String> {
    let rep = check_eds_identities(seq, max_index).map_err(e2s)?;
    ensure(rep.holds(), format!("{label}: {:?}", rep.violations.first()))?;
    let mut terms = seq.terms().to_vec();
    let k = terms.iter().position(|w| !w.vanishes()).ok_or("all terms vanish")?;
    let bump = terms[k].clone() + terms[k].clone();
    terms[k] = bump;
    let bad = EdsSequence::from_terms(terms).map_err(e2s)?;
    ensure(!check_eds_identities(&bad, max_index).map_err(e2s)?.holds(), format!("{label}: mutation undetected"))?;
    Ok(rep.three_term_checked + rep.four_term_checked)
}

fn criterion_9() -> Outcome {
    let mut total = 0;
    for (label, (e, p)) in [("ex1", ex1()), ("ex2", ex2()), ("ex3", ex3()), ("ex4", ex4())] {
        total += identities_and_mutation(&eds(&e, &p, 12).map_err(e2s)?, 12, label)?;
    }
    for alpha in [rat(2), rat(3)] {
        total += identities_and_mutation(&rank7_torsion_eds(&alpha, 12).map_err(e2s)?, 12, "order 7")?;
    }
    Ok(format!("{total} index tuples, every mutation detected"))
}

fn criterion_10() -> Outcome {
    let alphas = [rat(2), rat(3), rat(5), rat(-1), Rational::new(7.into(), 2.into())];
    for alpha in &alphas {
        let seq = rank7_torsion_eds(alpha, 30).map_err(e2s)?;
        for n in 1..=30i64 {
            let want = rank7_closed_form(alpha, n).map_err(e2s)?;
            ensure(seq.get(n) == Some(want), format!("alpha = {alpha}, n = {n}"))?;
        }
    }
    Ok("5 values of alpha, n <= 30, signs included".into())
}

fn criterion_11() -> Outcome {
    let mut want: Vec<(u64, u64)> = (1..=24).flat_map(|k| [(1, k), (k, 1)]).collect();
    want.extend([(2, 2), (3, 3), (2, 4), (2, 8)]);
    want.sort();
    want.dedup();
    let got = square_one_pairs(24);
    ensure(got == want, format!("{got:?}"))?;
    Ok(format!("{} pairs", got.len()))
}

/// Short integral curves with an integral point of infinite order.
fn height_corpus() -> Vec<(WeierstrassModel<Rational>, CurvePoint<Rational>)> {
    [(-2, 0, -1, 1), (0, 17, -2, 3), (0, -2, 3, 5), (1, 1, 0, 1), (-1, 1, 1, 1), (0, -2743, 14, 1)]
        .into_iter()
        .map(|(a, b, x, y)| {
            let e = WeierstrassModel::new([rat(0), rat(0), rat(0), rat(a), rat(b)]).unwrap();
            let p = e.point(rat(x), rat(y)).unwrap();
            (e, p)
        })
        .collect()
}

fn criterion_12() -> Outcome {
    let mut found = 0;
    for (e, p) in height_corpus() {
        let label = format!("{:?}", e.coefficients());
        ensure(curve_heights(&e).map_err(e2s)?.comparisons_hold(), format!("{label}: curve heights"))?;
        let b = check_denominator_bounds(&e, &p, 12, None).map_err(e2s)?;
        ensure(b.hypothesis.is_none() && b.holds(), format!("{label}: denominators {:?}", b.violations()))?;
        let m = integral_multiples(&e, &p, 30, INTEGRAL_MULTIPLE_COEFFICIENT, 1e-3).map_err(e2s)?;
        ensure(m.holds(), format!("{label}: integral multiples {:?}", m.multiples))?;
        found += m.checks.len();
    }
    let (e, p) = ex1();
    let gap = quadraticity_gap(&e, &p, 3, 1e-4).map_err(e2s)?;
    ensure(gap <= 0.0, format!("quadraticity gap {gap}"))?;
    Ok(format!("6 curves; {found} integral multiples with n >= 2 within bound; quadratic"))
}

type Criterion = (u32, &'static str, u64, fn() -> Outcome);

const CRITERIA: [Criterion; 12] = [
    (1, "troublemaker table", 1, criterion_1),
    (2, "first example", 10, criterion_2),
    (3, "second example", 10, criterion_3),
    (4, "third example", 10, criterion_4),
    (5, "fourth example", 10, criterion_5),
    (6, "2-adic example", 30, criterion_6),
    (7, "troublemaker identities", 60, criterion_7),
    (8, "formal group", 30, criterion_8),
    (9, "sequence identities", 30, criterion_9),
    (10, "order-7 torsion", 10, criterion_10),
    (11, "square-one pairs", 10, criterion_11),
    (12, "heights", 60, criterion_12),
];

fn main() -> ExitCode {
    let mut failed = 0;
    for (k, name, budget, run) in CRITERIA {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(_) if took > Duration::from_secs(budget) => Err(format!("took {took:.2?}, budget {budget}s")),
            other => other,
        };
        match outcome {
            Ok(msg) => println!("PASS {k:>2} {name}: {msg} ({took:.2?})"),
            Err(msg) => {
                failed += 1;
                println!("FAIL {k:>2} {name}: {msg} ({took:.2?})");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", CRITERIA.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
