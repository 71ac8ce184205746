//! The sequence `R_n(a, l)` that measures valuations at points with singular
//! reduction, its equivalent closed forms, and the reference table.

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::numbers::{rat, Rational};

/// Reduce `(a, l)` to `(â, |l|)` with `0 ≤ â < |l|`.
fn normalize(a: i64, ell: i64) -> Result<(i128, i128)> {
    if ell == 0 {
        return Err(Error::InvalidArgument("l must be nonzero".into()));
    }
    let l = (ell as i128).abs();
    Ok(((a as i128).rem_euclid(l), l))
}

fn overflow() -> Error {
    Error::InvalidArgument("R_n(a, l) overflows 64 bits".into())
}

/// `R_n(a, l) = ⌊n²â(l−â)/(2l)⌋ − ⌊ŝ(l−ŝ)/(2l)⌋`, `ŝ ≡ na (mod l)`.
///
/// Negative `n` gives the same value as `|n|`; negative `l` is replaced by `|l|`.
pub fn troublemaker(n: i64, a: i64, ell: i64) -> Result<i64> {
    let (ah, l) = normalize(a, ell)?;
    let n = (n as i128).abs();
    let sh = (n * ah).rem_euclid(l);
    let big = n
        .checked_mul(n)
        .and_then(|n2| n2.checked_mul(ah * (l - ah)))
        .ok_or_else(overflow)?;
    let v = Integer::div_floor(&big, &(2 * l)) - Integer::div_floor(&(sh * (l - sh)), &(2 * l));
    i64::try_from(v).map_err(|_| overflow())
}

/// Fractional part of a rational.
fn frac(q: &Rational) -> Rational {
    q - q.floor()
}

/// Closed forms that must all agree with [`troublemaker`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Main,
    /// Written with fractional parts of `na/l` and `a/l`.
    MainAlt,
    /// Fractional-part form valid for `0 ≤ a < l`.
    ShortMain,
    /// Via the periodic second Bernoulli polynomial.
    Bernoulli,
    /// As partial sums of arithmetic progressions.
    SumForm,
}

pub const VARIANTS: [Variant; 5] =
    [Variant::Main, Variant::MainAlt, Variant::ShortMain, Variant::Bernoulli, Variant::SumForm];

/// Evaluate one closed form exactly.
pub fn troublemaker_variant(n: i64, a: i64, ell: i64, variant: Variant) -> Result<Rational> {
    let (ah, l) = normalize(a, ell)?;
    let (a, l) = (ah as i64, l as i64);
    let n = n.abs();
    let nr = rat(n);
    let lr = rat(l);
    let half_l = &lr / rat(2);
    let ta = rat(a) / &lr;
    let tna = rat(n) * rat(a) / &lr;
    Ok(match variant {
        Variant::Main => rat(troublemaker(n, a, l)?),
        Variant::MainAlt => {
            let f1 = frac(&tna);
            let f2 = frac(&ta);
            half_l * (f1.clone() * f1.clone() - f1 - &nr * &nr * f2.clone() * f2.clone() + &nr * &nr * f2)
        }
        Variant::ShortMain => {
            if a < 0 || a >= l {
                return Err(Error::InvalidArgument("short form needs 0 <= a < l".into()));
            }
            let f = frac(&tna);
            half_l * (f.clone() * f.clone() - f + &nr * &nr * rat(a) * rat(l - a) / (&lr * &lr))
        }
        Variant::Bernoulli => {
            let b2 = |t: &Rational| {
                let f = frac(t);
                f.clone() * f - frac(t) + Rational::new(1.into(), 6.into())
            };
            half_l * (b2(&tna) - &nr * &nr * b2(&ta) + (&nr * &nr - rat(1)) / rat(6))
        }
        Variant::SumForm => {
            // Σ_{k=1}^{m} (k·l − x), continued polynomially in m.
            let partial = |m: i64, x: i64| rat(m) * rat(m + 1) / rat(2) * &lr - rat(m) * rat(x);
            let fna = Integer::div_floor(&(n * a), &l);
            let fa = Integer::div_floor(&a, &l);
            rat(n * n - n) / rat(2) * rat(a) + partial(fna, n * a) - &nr * &nr * partial(fa, a)
        }
    })
}

/// The real-valued approximation `n²â(l−â)/(2l)`.
pub fn quadratic_part(n: i64, a: i64, ell: i64) -> Result<Rational> {
    let (ah, l) = normalize(a, ell)?;
    Ok(rat(n) * rat(n) * rat(ah as i64) * rat((l - ah) as i64) / rat(2 * l as i64))
}

/// `(a, l)` pairs tabulated in the reference table, in row order.
pub const TABLE1_PAIRS: [(i64, i64); 14] = [
    (1, 2),
    (1, 3),
    (2, 3),
    (1, 4),
    (2, 4),
    (1, 5),
    (2, 5),
    (1, 6),
    (2, 6),
    (3, 6),
    (1, 7),
    (2, 7),
    (3, 7),
    (1, 11),
];

/// Published values of `R_n(a, l)` for `n = 1..=13`, one row per pair in
/// [`TABLE1_PAIRS`].
pub const TABLE1_GOLDEN: [[i64; 13]; 14] = [
    [0, 1, 2, 4, 6, 9, 12, 16, 20, 25, 30, 36, 42],
    [0, 1, 3, 5, 8, 12, 16, 21, 27, 33, 40, 48, 56],
    [0, 1, 3, 5, 8, 12, 16, 21, 27, 33, 40, 48, 56],
    [0, 1, 3, 6, 9, 13, 18, 24, 30, 37, 45, 54, 63],
    [0, 2, 4, 8, 12, 18, 24, 32, 40, 50, 60, 72, 84],
    [0, 1, 3, 6, 10, 14, 19, 25, 32, 40, 48, 57, 67],
    [0, 2, 5, 9, 15, 21, 29, 38, 48, 60, 72, 86, 101],
    [0, 1, 3, 6, 10, 15, 20, 26, 33, 41, 50, 60, 70],
    [0, 2, 6, 10, 16, 24, 32, 42, 54, 66, 80, 96, 112],
    [0, 3, 6, 12, 18, 27, 36, 48, 60, 75, 90, 108, 126],
    [0, 1, 3, 6, 10, 15, 21, 27, 34, 42, 51, 61, 72],
    [0, 2, 6, 11, 17, 25, 35, 45, 57, 71, 86, 102, 120],
    [0, 3, 7, 13, 21, 30, 42, 54, 69, 85, 103, 123, 144],
    [0, 1, 3, 6, 10, 15, 21, 28, 36, 45, 55, 65, 76],
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table1Row {
    pub a: i64,
    pub ell: i64,
    pub values: Vec<i64>,
}

/// Compute the reference table for `n = 1..=13`.
pub fn table1() -> Vec<Table1Row> {
    TABLE1_PAIRS
        .iter()
        .map(|&(a, ell)| Table1Row {
            a,
            ell,
            values: (1..=13).map(|n| troublemaker(n, a, ell).expect("small arguments")).collect(),
        })
        .collect()
}

/// CSV rendering with header `a,ell,n1,...,n13`.
pub fn table1_csv(rows: &[Table1Row]) -> String {
    let mut out = String::from("a,ell");
    for n in 1..=13 {
        out.push_str(&format!(",n{n}"));
    }
    out.push('\n');
    for r in rows {
        out.push_str(&format!("{},{}", r.a, r.ell));
        for v in &r.values {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    out
}

/// Cells where `rows` disagree with the published table: `(a, l, n, got, want)`.
pub fn table1_diff(rows: &[Table1Row]) -> Vec<(i64, i64, usize, i64, i64)> {
    let mut out = Vec::new();
    for (row, (&(a, ell), golden)) in rows.iter().zip(TABLE1_PAIRS.iter().zip(TABLE1_GOLDEN.iter())) {
        debug_assert_eq!((row.a, row.ell), (a, ell));
        for (i, (&got, &want)) in row.values.iter().zip(golden.iter()).enumerate() {
            if got != want {
                out.push((a, ell, i + 1, got, want));
            }
        }
    }
    out
}

/// Pairs `(a, b)` with `a, b ≤ bound` such that every `n` not divisible by
/// `a` has `n² ≡ 1 (mod b)`.
pub fn square_one_pairs(bound: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for a in 1..=bound {
        for b in 1..=bound {
            // The condition only depends on n modulo lcm(a, b).
            let period = 2 * a.lcm(&b);
            let ok = (1..=period).all(|n| n % a == 0 || (n * n) % b == 1 % b);
            if ok {
                out.push((a, b));
            }
        }
    }
    out
}

/// `|R_n(a, l) − n²â(l−â)/(2l)| ≤ l/8`, checked exactly.
pub fn within_eighth(n: i64, a: i64, ell: i64) -> Result<bool> {
    let r = rat(troublemaker(n, a, ell)?);
    let gap = r - quadratic_part(n, a, ell)?;
    let bound = rat(ell.abs()) / rat(8);
    Ok(gap.clone() <= bound && -gap <= bound)
}

/// `⌊n²a(l−a)/(2l)⌋`, the single-floor shortcut for `0 ≤ a < l`.
pub fn single_floor(n: i64, a: i64, ell: i64) -> i64 {
    let (n, a, l) = (n as i128, a as i128, ell as i128);
    Integer::div_floor(&(n * n * a * (l - a)), &(2 * l)) as i64
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct PropertyFailure {
    pub property: &'static str,
    pub n: i64,
    pub a: i64,
    pub ell: i64,
}

#[derive(Clone, Debug, Default, serde::Serialize)]
pub struct PropertyReport {
    pub checked: usize,
    pub failures: Vec<PropertyFailure>,
    /// Some `(n, a, l)` with `l ≥ 8` where [`single_floor`] is wrong.
    pub single_floor_witness: Option<(i64, i64, i64)>,
}

impl PropertyReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty() && self.single_floor_witness.is_some()
    }
}

/// Check the structural identities of `R_n(a, l)` for `0 ≤ a ≤ l ≤ ell_max`
/// and `0 ≤ n, m ≤ n_max`.
pub fn check_properties(ell_max: i64, n_max: i64) -> Result<PropertyReport> {
    let r = troublemaker;
    let mut rep = PropertyReport::default();
    let check = |rep: &mut PropertyReport, ok: bool, property, n, a, ell| {
        rep.checked += 1;
        if !ok {
            rep.failures.push(PropertyFailure { property, n, a, ell });
        }
    };
    for ell in 1..=ell_max {
        for a in 0..=ell {
            check(&mut rep, r(0, a, ell)? == 0 && r(1, a, ell)? == 0, "vanishing", 0, a, ell);
            for n in 0..=n_max {
                let v = r(n, a, ell)?;
                check(&mut rep, r(n, ell - a, ell)? == v && r(n, ell + a, ell)? == v, "reflection", n, a, ell);
                for k in 2..=5 {
                    check(&mut rep, r(n, k * a, k * ell)? == k * v, "scaling", n, a, ell);
                }
                for m in 0..=n_max {
                    let ok = r(n, m * a, ell)? == r(n * m, a, ell)? - n * n * r(m, a, ell)?;
                    check(&mut rep, ok, "multiplicativity", n, a, ell);
                }
                if n >= 1 {
                    let second = r(n + 1, a, ell)? + r(n - 1, a, ell)? - 2 * v;
                    check(&mut rep, second < ell, "second_difference", n, a, ell);
                }
                if a > 0 && n > 0 && n * a < ell {
                    check(&mut rep, v == (n * n - n) / 2 * a, "triangular", n, a, ell);
                }
                if a < ell {
                    let sf = single_floor(n, a, ell) == v;
                    if ell <= 7 || (n * a) % ell == 0 {
                        check(&mut rep, sf, "single_floor", n, a, ell);
                    } else if !sf && rep.single_floor_witness.is_none() {
                        rep.single_floor_witness = Some((n, a, ell));
                    }
                }
                for variant in VARIANTS {
                    if variant == Variant::ShortMain && a == ell {
                        continue;
                    }
                    let ok = troublemaker_variant(n, a, ell, variant)? == rat(v);
                    check(&mut rep, ok, "variant", n, a, ell);
                }
                check(&mut rep, within_eighth(n, a, ell)?, "eighth_bound", n, a, ell);
            }
        }
    }
    Ok(rep)
}
