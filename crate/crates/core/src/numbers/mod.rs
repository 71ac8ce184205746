//! Exact arithmetic: rationals, valuations, truncated p-adic numbers and
//! prime fields.

mod fp;
mod padic;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use fp::Fp;
pub use padic::{ArithOp, Padic, GUARD_DIGITS};

/// Exact rational number, always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Valuation in `Z ∪ {∞}`.
///
/// `Infinite` sorts above every finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtValuation {
    Finite(i64),
    Infinite,
}

impl ExtValuation {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtValuation::Finite(_))
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            ExtValuation::Finite(v) => Some(v),
            ExtValuation::Infinite => None,
        }
    }

    /// Multiply by a non-negative integer; `0 · ∞` is taken to be `∞`.
    pub fn scale(self, k: i64) -> ExtValuation {
        match self {
            ExtValuation::Finite(v) => ExtValuation::Finite(v * k),
            ExtValuation::Infinite => ExtValuation::Infinite,
        }
    }
}

impl From<i64> for ExtValuation {
    fn from(v: i64) -> Self {
        ExtValuation::Finite(v)
    }
}

impl Add for ExtValuation {
    type Output = ExtValuation;
    fn add(self, rhs: ExtValuation) -> ExtValuation {
        match (self, rhs) {
            (ExtValuation::Finite(a), ExtValuation::Finite(b)) => ExtValuation::Finite(a + b),
            _ => ExtValuation::Infinite,
        }
    }
}

impl Add<i64> for ExtValuation {
    type Output = ExtValuation;
    fn add(self, rhs: i64) -> ExtValuation {
        self + ExtValuation::Finite(rhs)
    }
}

impl PartialEq<i64> for ExtValuation {
    fn eq(&self, other: &i64) -> bool {
        *self == ExtValuation::Finite(*other)
    }
}

impl PartialOrd<i64> for ExtValuation {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        self.partial_cmp(&ExtValuation::Finite(*other))
    }
}

impl fmt::Display for ExtValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtValuation::Finite(v) => write!(f, "{v}"),
            ExtValuation::Infinite => write!(f, "inf"),
        }
    }
}

// JSON has no infinity: ∞ travels as null.
impl Serialize for ExtValuation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtValuation::Finite(v) => s.serialize_i64(*v),
            ExtValuation::Infinite => s.serialize_none(),
        }
    }
}

impl<'de> Deserialize<'de> for ExtValuation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Option<i64> = Option::deserialize(d)?;
        Ok(v.map_or(ExtValuation::Infinite, ExtValuation::Finite))
    }
}

/// A field-like value domain usable by the curve and division-polynomial code.
///
/// Implemented by [`Rational`], [`Padic`] and [`Fp`].
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// The integer `n` embedded in the same domain (and precision) as `self`.
    fn int_like(&self, n: i64) -> Self;
    /// True for zero, or for a value indistinguishable from zero at the available precision.
    fn vanishes(&self) -> bool;
    fn try_div(&self, rhs: &Self) -> Result<Self>;

    fn square(&self) -> Self {
        self.clone() * self.clone()
    }

    fn cube(&self) -> Self {
        self.square() * self.clone()
    }
}

/// Scalars carrying a `p`-adic valuation.
pub trait Valued: Scalar {
    fn valuation(&self, p: u64) -> Result<ExtValuation>;
    /// Reduction modulo `p` of a `p`-integral value.
    fn residue(&self, p: u64) -> Result<u64>;
}

impl Scalar for Rational {
    fn int_like(&self, n: i64) -> Self {
        Rational::from_integer(n.into())
    }

    fn vanishes(&self) -> bool {
        self.is_zero()
    }

    fn try_div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self / rhs)
    }
}

impl Valued for Rational {
    fn valuation(&self, p: u64) -> Result<ExtValuation> {
        vp(self, p)
    }

    fn residue(&self, p: u64) -> Result<u64> {
        if vp(self, p)? < 0 {
            return Err(Error::NonIntegral(p));
        }
        let m = BigInt::from(p);
        let num = self.numer().mod_floor(&m);
        let den = self.denom().mod_floor(&m);
        let inv = den.modinv(&m).ok_or(Error::DivisionByZero)?;
        Ok((num * inv).mod_floor(&m).to_u64().expect("residue below p"))
    }
}

/// Deterministic primality test for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        r
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub(crate) fn require_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// `p`-adic valuation of a nonzero integer.
pub(crate) fn vp_uint(n: &BigUint, p: u64) -> i64 {
    if n.is_zero() {
        return i64::MAX;
    }
    if p == 2 {
        return n.trailing_zeros().unwrap_or(0) as i64;
    }
    let mut v = 0;
    let mut n = n.clone();
    // Strip large prime powers first so huge valuations stay cheap.
    let mut chunk = BigUint::from(p);
    let mut chunk_exp = 1i64;
    loop {
        let (q, r) = n.div_rem(&chunk);
        if r.is_zero() {
            n = q;
            v += chunk_exp;
            chunk = &chunk * &chunk;
            chunk_exp *= 2;
        } else if chunk_exp == 1 {
            return v;
        } else {
            chunk = BigUint::from(p);
            chunk_exp = 1;
        }
    }
}

/// `p`-adic valuation of an integer (∞ for zero).
pub fn vp_int(n: &BigInt, p: u64) -> Result<ExtValuation> {
    require_prime(p)?;
    if n.is_zero() {
        return Ok(ExtValuation::Infinite);
    }
    Ok(ExtValuation::Finite(vp_uint(n.magnitude(), p)))
}

/// `p`-adic valuation of a rational number (∞ for zero).
pub fn vp(q: &Rational, p: u64) -> Result<ExtValuation> {
    require_prime(p)?;
    if q.is_zero() {
        return Ok(ExtValuation::Infinite);
    }
    let a = vp_uint(q.numer().magnitude(), p);
    let b = vp_uint(q.denom().magnitude(), p);
    Ok(ExtValuation::Finite(a - b))
}

/// Parse `"num/den"` or `"num"` into a rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Input(format!("not a rational number: {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::Input(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(num, den))
}

/// Canonical `"num/den"` serialization.
pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Human-oriented form: integers print without a denominator.
pub fn format_plain(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format_rational(q)
    }
}

/// Natural logarithm of `|n|` for arbitrarily large integers.
pub fn ln_abs(n: &BigInt) -> f64 {
    ln_uint(n.magnitude())
}

pub(crate) fn ln_uint(n: &BigUint) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    if bits <= 960 {
        return n.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().expect("64-bit value");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Primes below `bound` (sieve of Eratosthenes).
pub(crate) fn primes_below(bound: u64) -> Vec<u64> {
    let n = bound as usize;
    if n < 3 {
        return Vec::new();
    }
    let mut sieve = vec![true; n];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i < n {
        if sieve[i] {
            let mut j = i * i;
            while j < n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (0..n).filter(|&k| sieve[k]).map(|k| k as u64).collect()
}

/// Factor out all primes below `bound`; returns the factors found and the
/// remaining cofactor.
pub fn trial_factor(n: &BigUint, bound: u64) -> (Vec<(u64, u32)>, BigUint) {
    let mut rest = n.clone();
    let mut out = Vec::new();
    if rest.is_zero() {
        return (out, rest);
    }
    for p in primes_below(bound) {
        if rest.is_one() {
            break;
        }
        if (&rest % p).is_zero() {
            let e = vp_uint(&rest, p);
            rest /= BigUint::from(p).pow(e as u32);
            out.push((p, e as u32));
        }
        if BigUint::from(p) * BigUint::from(p) > rest {
            if !rest.is_one() {
                if let Some(q) = rest.to_u64() {
                    if q < bound.saturating_mul(bound) {
                        out.push((q, 1));
                        rest = BigUint::one();
                    }
                }
            }
            break;
        }
    }
    out.sort();
    (out, rest)
}

/// Factored form such as `-2^24·3·5^-1`, trial-dividing below `bound`.
pub fn format_factored(q: &Rational, bound: u64) -> String {
    if q.is_zero() {
        return "0".to_string();
    }
    let mut parts: Vec<(BigUint, i64)> = Vec::new();
    let (nf, nrest) = trial_factor(q.numer().magnitude(), bound);
    let (df, drest) = trial_factor(q.denom().magnitude(), bound);
    for (p, e) in nf {
        parts.push((BigUint::from(p), e as i64));
    }
    for (p, e) in df {
        parts.push((BigUint::from(p), -(e as i64)));
    }
    parts.sort();
    if !nrest.is_one() {
        parts.push((nrest, 1));
    }
    if !drest.is_one() {
        parts.push((drest, -1));
    }
    let sign = if q.is_negative() { "-" } else { "" };
    if parts.is_empty() {
        return format!("{sign}1");
    }
    let body: Vec<String> = parts
        .iter()
        .map(|(p, e)| if *e == 1 { p.to_string() } else { format!("{p}^{e}") })
        .collect();
    format!("{sign}{}", body.join("·"))
}

/// An integer as a rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}
