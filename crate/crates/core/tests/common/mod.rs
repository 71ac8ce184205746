//! Worked-example curves and their printed valuation sequences.
#![allow(dead_code)]

use edsval::curves::{CurvePoint, WeierstrassModel};
use edsval::numbers::{parse_rational, ExtValuation, Padic, Rational};

/// 2-adic digits carried for the √17 example.
pub const PADIC_DIGITS: u32 = 320;

pub fn q(s: &str) -> Rational {
    parse_rational(s).unwrap()
}

pub fn model(a: [&str; 5]) -> WeierstrassModel<Rational> {
    WeierstrassModel::from_strs(a).unwrap()
}

pub fn fin(v: &[i64]) -> Vec<ExtValuation> {
    v.iter().map(|&x| ExtValuation::Finite(x)).collect()
}

pub fn ex1() -> (WeierstrassModel<Rational>, CurvePoint<Rational>) {
    let e = model(["1", "1", "0", "-1652", "25168"]);
    let p = e.point(q("24"), q("-4")).unwrap();
    (e, p)
}

pub fn ex2() -> (WeierstrassModel<Rational>, CurvePoint<Rational>) {
    let e = model(["0", "0", "0", "2471", "1"]);
    let p = e.point(q("1/25"), q("1249/125")).unwrap();
    (e, p)
}

pub fn ex3() -> (WeierstrassModel<Rational>, CurvePoint<Rational>) {
    let e = model(["1", "1", "1", "-135", "-660"]);
    let p = e.point(q("-29/4"), q("25/8")).unwrap();
    (e, p)
}

pub fn ex4() -> (WeierstrassModel<Rational>, CurvePoint<Rational>) {
    let e = model(["0", "14", "49", "-312352901", "2123335052286"]);
    let p = e.point(q("10206"), q("1176")).unwrap();
    (e, p)
}

/// `y² = x³ + αx + α + 2` over `Q_2` with `α = √17 ≡ 1 (mod 4)`, and
/// `P = (−17, β)`.
pub fn ex5(digits: u32) -> (WeierstrassModel<Padic>, CurvePoint<Padic>) {
    let c = |n: i64| Padic::from_int(n, 2, digits + 8).unwrap();
    let alpha = c(17).hensel_sqrt(digits).unwrap();
    let a6 = alpha.try_add(&c(2)).unwrap();
    let e = WeierstrassModel::new([c(0), c(0), c(0), alpha.clone(), a6]).unwrap();
    // β² = −4913 − 17α + α + 2 = −4911 − 16α
    let rhs = c(-4911).try_add(&c(-16).try_mul(&alpha).unwrap()).unwrap();
    let beta = rhs.hensel_sqrt(digits).unwrap();
    let p = e.point(c(-17), beta).unwrap();
    (e, p)
}

pub const EX1_V2: [i64; 31] = [
    0, 4, 8, 16, 24, 37, 48, 64, 80, 100, 120, 147, 168, 196, 224, 256, 288, 325, 360, 400, 440, 484, 528, 580,
    624, 676, 728, 784, 840, 901, 960,
];

pub const EX1_V3: [i64; 55] = [
    0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 2, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 2, 0, 0, 0, 0, 1, 0, 0,
    0, 0, 1, 0, 0, 0, 0, 3, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1,
];

pub const EX1_V7: [i64; 54] = [
    0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0,
    0, 0, 0, 0, 2, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1,
];

pub const EX2_V2: [i64; 48] = [
    0, 1, 3, 5, 8, 13, 16, 21, 27, 33, 40, 50, 56, 65, 75, 85, 96, 109, 120, 133, 147, 161, 176, 195, 208, 225,
    243, 261, 280, 301, 320, 341, 363, 385, 408, 434, 456, 481, 507, 533, 560, 589, 616, 645, 675, 705, 736, 772,
];

pub const EX2_V5: [i64; 32] = [
    0, -3, -8, -15, -23, -35, -48, -63, -80, -98, -120, -143, -168, -195, -223, -255, -288, -323, -360, -398,
    -440, -483, -528, -575, -622, -675, -728, -783, -840, -898, -960, -1023,
];

pub const EX4_V7: [i64; 42] = [
    0, 4, 9, 18, 27, 40, 54, 72, 90, 112, 135, 162, 189, 220, 252, 288, 324, 364, 405, 450, 495, 544, 594, 648,
    702, 760, 819, 883, 945, 1012, 1080, 1152, 1224, 1300, 1377, 1458, 1539, 1624, 1710, 1800, 1890, 1984,
];

pub const EX5_V2: [i64; 25] = [
    0, 1, 2, 5, 6, 9, 12, 18, 20, 25, 30, 37, 42, 49, 56, 67, 72, 81, 90, 101, 110, 121, 132, 146, 156,
];
