use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::{require_prime, vp_uint, ExtValuation, Rational, Scalar, Valued};
use crate::error::{Error, Result};

/// Valuations are refused once fewer than this many digits separate them
/// from the absolute precision bound.
pub const GUARD_DIGITS: u32 = 8;

/// Truncated element of `Q_p`: `p^val · unit + O(p^(val + prec))`.
///
/// `cap` is the working precision used when integers are embedded next to
/// this value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Padic {
    p: u64,
    cap: u32,
    body: Body,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Body {
    Exact0,
    /// Zero to the stated absolute precision.
    Zero { abs: i64 },
    Unit { val: i64, unit: BigInt, prec: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

fn pow_p(p: u64, k: u32) -> BigInt {
    BigInt::from(p).pow(k)
}

impl Padic {
    pub fn zero(p: u64, cap: u32) -> Result<Self> {
        require_prime(p)?;
        Ok(Padic { p, cap, body: Body::Exact0 })
    }

    pub fn from_int(n: i64, p: u64, prec: u32) -> Result<Self> {
        Self::from_rational(&Rational::from_integer(n.into()), p, prec)
    }

    /// Embed a rational number with `prec` digits of relative precision.
    pub fn from_rational(q: &Rational, p: u64, prec: u32) -> Result<Self> {
        require_prime(p)?;
        if prec == 0 {
            return Err(Error::InvalidArgument("precision must be positive".into()));
        }
        if q.is_zero() {
            return Ok(Padic { p, cap: prec, body: Body::Exact0 });
        }
        let a = vp_uint(q.numer().magnitude(), p);
        let b = vp_uint(q.denom().magnitude(), p);
        let num = q.numer() / pow_p(p, a as u32);
        let den = q.denom() / pow_p(p, b as u32);
        let m = pow_p(p, prec);
        let inv = den.mod_floor(&m).modinv(&m).expect("denominator is a unit");
        let unit = (num * inv).mod_floor(&m);
        Ok(Padic { p, cap: prec, body: Body::Unit { val: a - b, unit, prec } })
    }

    fn with_body(&self, body: Body) -> Padic {
        Padic { p: self.p, cap: self.cap, body }
    }

    fn unit_body(p: u64, val: i64, raw: BigInt, prec: u32, abs: i64) -> Body {
        // `raw` is known modulo p^prec; strip p-factors and re-normalize.
        let m = pow_p(p, prec);
        let raw = raw.mod_floor(&m);
        if raw.is_zero() {
            return Body::Zero { abs };
        }
        let k = vp_uint(raw.magnitude(), p);
        let unit = raw / pow_p(p, k as u32);
        let prec = prec - k as u32;
        Body::Unit { val: val + k, unit: unit.mod_floor(&pow_p(p, prec)), prec }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.body, Body::Exact0)
    }

    /// Relative precision in digits; `None` for zeros.
    pub fn relative_precision(&self) -> Option<u32> {
        match self.body {
            Body::Unit { prec, .. } => Some(prec),
            _ => None,
        }
    }

    /// Absolute precision bound; `None` for an exact zero.
    pub fn absolute_precision(&self) -> Option<i64> {
        match self.body {
            Body::Exact0 => None,
            Body::Zero { abs } => Some(abs),
            Body::Unit { val, prec, .. } => Some(val + prec as i64),
        }
    }

    /// Unit part in `[1, p^prec)`; `None` for zeros.
    pub fn unit_digits(&self) -> Option<&BigInt> {
        match &self.body {
            Body::Unit { unit, .. } => Some(unit),
            _ => None,
        }
    }

    /// Valuation without any precision guard. Fails only on an inexact zero.
    pub fn valuation_unguarded(&self) -> Result<ExtValuation> {
        match self.body {
            Body::Exact0 => Ok(ExtValuation::Infinite),
            Body::Zero { abs } => {
                Err(Error::PrecisionExhausted(format!("value is O({}^{abs})", self.p)))
            }
            Body::Unit { val, .. } => Ok(ExtValuation::Finite(val)),
        }
    }

    /// Valuation, refused when fewer than `guard` digits of relative
    /// precision remain.
    pub fn valuation_guarded(&self, guard: u32) -> Result<ExtValuation> {
        match self.body {
            Body::Unit { val, prec, .. } if prec <= guard => Err(Error::PrecisionExhausted(
                format!("valuation {val} with only {prec} digits of precision left"),
            )),
            _ => self.valuation_unguarded(),
        }
    }

    /// A rational representative `p^val · unit` (zero for zeros).
    pub fn lift(&self) -> Rational {
        match &self.body {
            Body::Unit { val, unit, .. } => {
                let u = Rational::from_integer(unit.clone());
                if *val >= 0 {
                    u * Rational::from_integer(pow_p(self.p, *val as u32))
                } else {
                    u / Rational::from_integer(pow_p(self.p, (-*val) as u32))
                }
            }
            _ => Rational::zero(),
        }
    }

    fn check_prime(&self, rhs: &Padic) -> Result<()> {
        if self.p != rhs.p {
            Err(Error::PrimeMismatch(self.p, rhs.p))
        } else {
            Ok(())
        }
    }

    pub fn arith(&self, rhs: &Padic, op: ArithOp) -> Result<Padic> {
        match op {
            ArithOp::Add => self.try_add(rhs),
            ArithOp::Sub => self.try_add(&rhs.negated()),
            ArithOp::Mul => self.try_mul(rhs),
            ArithOp::Div => self.try_quotient(rhs),
        }
    }

    pub fn negated(&self) -> Padic {
        match &self.body {
            Body::Unit { val, unit, prec } => {
                let m = pow_p(self.p, *prec);
                self.with_body(Body::Unit { val: *val, unit: (-unit).mod_floor(&m), prec: *prec })
            }
            _ => self.clone(),
        }
    }

    pub fn try_add(&self, rhs: &Padic) -> Result<Padic> {
        self.check_prime(rhs)?;
        let p = self.p;
        let cap = self.cap.max(rhs.cap);
        let body = match (&self.body, &rhs.body) {
            (Body::Exact0, _) => rhs.body.clone(),
            (_, Body::Exact0) => self.body.clone(),
            (Body::Zero { abs: a }, Body::Zero { abs: b }) => Body::Zero { abs: (*a).min(*b) },
            (Body::Zero { abs }, Body::Unit { val, unit, prec })
            | (Body::Unit { val, unit, prec }, Body::Zero { abs }) => {
                if *val >= *abs {
                    Body::Zero { abs: *abs }
                } else {
                    let new_prec = (*prec as i64).min(abs - val) as u32;
                    Body::Unit { val: *val, unit: unit.mod_floor(&pow_p(p, new_prec)), prec: new_prec }
                }
            }
            (
                Body::Unit { val: v1, unit: u1, prec: r1 },
                Body::Unit { val: v2, unit: u2, prec: r2 },
            ) => {
                let v = (*v1).min(*v2);
                let abs = (v1 + *r1 as i64).min(v2 + *r2 as i64);
                let rel = (abs - v) as u32;
                let shift = |u: &BigInt, w: i64| -> BigInt {
                    let e = w - v;
                    if e >= rel as i64 {
                        BigInt::zero()
                    } else {
                        u * pow_p(p, e as u32)
                    }
                };
                let raw = shift(u1, *v1) + shift(u2, *v2);
                Self::unit_body(p, v, raw, rel, abs)
            }
        };
        Ok(Padic { p, cap, body })
    }

    pub fn try_mul(&self, rhs: &Padic) -> Result<Padic> {
        self.check_prime(rhs)?;
        let p = self.p;
        let cap = self.cap.max(rhs.cap);
        let body = match (&self.body, &rhs.body) {
            (Body::Exact0, _) | (_, Body::Exact0) => Body::Exact0,
            (Body::Zero { abs: a }, Body::Zero { abs: b }) => Body::Zero { abs: a + b },
            (Body::Zero { abs }, Body::Unit { val, .. })
            | (Body::Unit { val, .. }, Body::Zero { abs }) => Body::Zero { abs: abs + val },
            (
                Body::Unit { val: v1, unit: u1, prec: r1 },
                Body::Unit { val: v2, unit: u2, prec: r2 },
            ) => {
                let prec = (*r1).min(*r2);
                let unit = (u1 * u2).mod_floor(&pow_p(p, prec));
                Body::Unit { val: v1 + v2, unit, prec }
            }
        };
        Ok(Padic { p, cap, body })
    }

    pub fn try_quotient(&self, rhs: &Padic) -> Result<Padic> {
        self.check_prime(rhs)?;
        let p = self.p;
        let cap = self.cap.max(rhs.cap);
        let body = match (&self.body, &rhs.body) {
            (_, Body::Exact0) => return Err(Error::DivisionByZero),
            (_, Body::Zero { .. }) => {
                return Err(Error::PrecisionExhausted("division by an inexact zero".into()))
            }
            (Body::Exact0, _) => Body::Exact0,
            (Body::Zero { abs }, Body::Unit { val, .. }) => Body::Zero { abs: abs - val },
            (
                Body::Unit { val: v1, unit: u1, prec: r1 },
                Body::Unit { val: v2, unit: u2, prec: r2 },
            ) => {
                let prec = (*r1).min(*r2);
                let m = pow_p(p, prec);
                let inv = u2.mod_floor(&m).modinv(&m).expect("unit is invertible");
                Body::Unit { val: v1 - v2, unit: (u1 * inv).mod_floor(&m), prec }
            }
        };
        Ok(Padic { p, cap, body })
    }

    /// Square root of a unit by Hensel lifting, to `target` digits (fewer if
    /// the input does not carry enough precision).
    ///
    /// The returned root is canonical: congruent to 1 mod 4 when `p = 2`, and
    /// with residue below `p/2` otherwise.
    pub fn hensel_sqrt(&self, target: u32) -> Result<Padic> {
        let p = self.p;
        let (unit, prec) = match &self.body {
            Body::Unit { val: 0, unit, prec } => (unit.clone(), *prec),
            Body::Unit { .. } => return Err(Error::NotUnit),
            _ => return Err(Error::NotUnit),
        };
        if p == 2 {
            if prec < 3 {
                return Err(Error::PrecisionExhausted("need the input modulo 8".into()));
            }
            if (&unit % 8u32) != BigInt::one() {
                return Err(Error::NoSquareRoot);
            }
            let t = target.min(prec - 1);
            let mut x = BigInt::one();
            let mut k = 3u32;
            while k < t + 1 {
                let m = pow_p(2, k + 1);
                if !(&x * &x - &unit).mod_floor(&m).is_zero() {
                    x += pow_p(2, k - 1);
                }
                k += 1;
            }
            let m = pow_p(2, t);
            let mut x = x.mod_floor(&m);
            if (&x % 4u32) == BigInt::from(3) {
                x = (-x).mod_floor(&m);
            }
            return Ok(self.with_body(Body::Unit { val: 0, unit: x, prec: t }));
        }
        if p > 1 << 24 {
            return Err(Error::ResourceLimit(format!("square root search modulo {p}")));
        }
        let a0 = (&unit % p).to_u64().expect("residue");
        let r0 = (1..p)
            .find(|&r| (r as u128 * r as u128) % p as u128 == a0 as u128)
            .ok_or(Error::NoSquareRoot)?;
        let r0 = r0.min(p - r0);
        let t = target.min(prec);
        let mut x = BigInt::from(r0);
        let mut k = 1u32;
        while k < t {
            k = (2 * k).min(t);
            let m = pow_p(p, k);
            let f = (&x * &x - &unit).mod_floor(&m);
            let df = (BigInt::from(2) * &x).modinv(&m).expect("2x is a unit");
            x = (&x - f * df).mod_floor(&m);
        }
        let x = x.mod_floor(&pow_p(p, t));
        Ok(self.with_body(Body::Unit { val: 0, unit: x, prec: t }))
    }
}

impl fmt::Display for Padic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.body {
            Body::Exact0 => write!(f, "0"),
            Body::Zero { abs } => write!(f, "O({}^{abs})", self.p),
            Body::Unit { val, unit, prec } => {
                write!(f, "{}^{val}*{unit} + O({}^{})", self.p, self.p, val + *prec as i64)
            }
        }
    }
}

// Operator forms panic on a prime mismatch; use the `try_*` methods when
// operands may come from different primes.
impl Add for Padic {
    type Output = Padic;
    fn add(self, rhs: Padic) -> Padic {
        self.try_add(&rhs).expect("p-adic operands share a prime")
    }
}

impl Sub for Padic {
    type Output = Padic;
    fn sub(self, rhs: Padic) -> Padic {
        self.try_add(&rhs.negated()).expect("p-adic operands share a prime")
    }
}

impl Mul for Padic {
    type Output = Padic;
    fn mul(self, rhs: Padic) -> Padic {
        self.try_mul(&rhs).expect("p-adic operands share a prime")
    }
}

impl Neg for Padic {
    type Output = Padic;
    fn neg(self) -> Padic {
        self.negated()
    }
}

impl Scalar for Padic {
    fn int_like(&self, n: i64) -> Self {
        Padic::from_int(n, self.p, self.cap).expect("prime checked at construction")
    }

    fn vanishes(&self) -> bool {
        !matches!(self.body, Body::Unit { .. })
    }

    fn try_div(&self, rhs: &Self) -> Result<Self> {
        self.try_quotient(rhs)
    }
}

impl Valued for Padic {
    fn valuation(&self, p: u64) -> Result<ExtValuation> {
        if p != self.p {
            return Err(Error::PrimeMismatch(self.p, p));
        }
        self.valuation_guarded(GUARD_DIGITS)
    }

    fn residue(&self, p: u64) -> Result<u64> {
        if p != self.p {
            return Err(Error::PrimeMismatch(self.p, p));
        }
        match &self.body {
            Body::Exact0 => Ok(0),
            Body::Zero { abs } if *abs >= 1 => Ok(0),
            Body::Zero { .. } => Err(Error::PrecisionExhausted("residue of O(1)".into())),
            Body::Unit { val, .. } if *val < 0 => Err(Error::NonIntegral(p)),
            Body::Unit { val, .. } if *val > 0 => Ok(0),
            Body::Unit { unit, .. } => Ok((unit % p).to_u64().expect("residue")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::{parse_rational, rat};

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn cancellation_leaves_a_bounded_zero() {
        let a = Padic::from_int(1, 2, 10).unwrap();
        let b = Padic::from_int(-1, 2, 10).unwrap();
        let s = a.try_add(&b).unwrap();
        assert!(s.vanishes());
        assert_eq!(s.absolute_precision(), Some(10));
        assert!(s.valuation_unguarded().is_err());
    }

    #[test]
    fn division_by_itself_is_one() {
        let x = Padic::from_rational(&q("1249/125"), 5, 40).unwrap();
        let one = x.try_div(&x).unwrap();
        assert_eq!(one.lift(), rat(1));
        assert_eq!(one.relative_precision(), Some(40));
    }

    #[test]
    fn prime_mismatch_is_an_error() {
        let a = Padic::from_int(3, 2, 10).unwrap();
        let b = Padic::from_int(3, 3, 10).unwrap();
        assert_eq!(a.try_add(&b), Err(Error::PrimeMismatch(2, 3)));
        assert!(Padic::from_int(3, 9, 10).is_err());
    }

    #[test]
    fn valuations_track_the_rational() {
        let x = Padic::from_rational(&q("-4719/196"), 7, 30).unwrap();
        assert_eq!(x.valuation(7).unwrap(), -2);
        let y = Padic::from_rational(&q("98"), 7, 30).unwrap();
        assert_eq!((x * y).valuation(7).unwrap(), 0);
    }

    #[test]
    fn guard_refuses_thin_precision() {
        let x = Padic::from_int(5, 5, 6).unwrap();
        assert!(x.valuation(5).is_err());
        assert_eq!(x.valuation_unguarded().unwrap(), 1);
    }

    #[test]
    fn arithmetic_matches_rationals_mod_precision() {
        let a = q("17/3");
        let b = q("-40/9");
        let pa = Padic::from_rational(&a, 3, 30).unwrap();
        let pb = Padic::from_rational(&b, 3, 30).unwrap();
        for (op, exact) in [
            (ArithOp::Add, &a + &b),
            (ArithOp::Sub, &a - &b),
            (ArithOp::Mul, &a * &b),
            (ArithOp::Div, &a / &b),
        ] {
            let got = pa.arith(&pb, op).unwrap();
            let want = Padic::from_rational(&exact, 3, 30).unwrap();
            let diff = got.try_add(&want.negated()).unwrap();
            assert!(diff.vanishes(), "{op:?}: {got} vs {want}");
        }
    }

    #[test]
    fn hensel_square_roots() {
        let a = Padic::from_int(17, 2, 64).unwrap();
        let r = a.hensel_sqrt(60).unwrap();
        assert_eq!(r.relative_precision(), Some(60));
        assert_eq!(r.unit_digits().unwrap() % 4u32, BigInt::one());
        let sq = r.clone() * r;
        let diff = sq.try_add(&a.negated()).unwrap();
        assert!(diff.vanishes());
        assert!(diff.absolute_precision().unwrap() >= 60);

        let b = Padic::from_int(2, 7, 20).unwrap();
        let s = b.hensel_sqrt(20).unwrap();
        assert_eq!(s.unit_digits().unwrap() % 7u32, BigInt::from(3));
        assert!((s.clone() * s).try_add(&b.negated()).unwrap().vanishes());

        assert_eq!(Padic::from_int(3, 2, 20).unwrap().hensel_sqrt(10), Err(Error::NoSquareRoot));
        assert_eq!(Padic::from_int(3, 7, 20).unwrap().hensel_sqrt(10), Err(Error::NoSquareRoot));
        assert_eq!(Padic::from_int(4, 2, 20).unwrap().hensel_sqrt(10), Err(Error::NotUnit));
    }
}
