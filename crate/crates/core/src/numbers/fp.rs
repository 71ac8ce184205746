use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{require_prime, Scalar};
use crate::error::{Error, Result};

/// Element of the prime field `F_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fp {
    p: u64,
    r: u64,
}

impl Fp {
    pub fn new(value: i64, p: u64) -> Result<Fp> {
        require_prime(p)?;
        Ok(Fp { p, r: value.rem_euclid(p as i64) as u64 })
    }

    pub(crate) fn from_residue(r: u64, p: u64) -> Fp {
        Fp { p, r: r % p }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn value(&self) -> u64 {
        self.r
    }

    fn pow(self, mut e: u64) -> Fp {
        let mut base = self;
        let mut acc = Fp { p: self.p, r: 1 % self.p };
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    pub fn inverse(self) -> Result<Fp> {
        if self.r == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(self.p - 2))
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.r, self.p)
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        debug_assert_eq!(self.p, rhs.p);
        Fp { p: self.p, r: ((self.r as u128 + rhs.r as u128) % self.p as u128) as u64 }
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        self + (-rhs)
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        debug_assert_eq!(self.p, rhs.p);
        Fp { p: self.p, r: ((self.r as u128 * rhs.r as u128) % self.p as u128) as u64 }
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp { p: self.p, r: (self.p - self.r) % self.p }
    }
}

impl Scalar for Fp {
    fn int_like(&self, n: i64) -> Self {
        Fp { p: self.p, r: n.rem_euclid(self.p as i64) as u64 }
    }

    fn vanishes(&self) -> bool {
        self.r == 0
    }

    fn try_div(&self, rhs: &Self) -> Result<Self> {
        Ok(*self * rhs.inverse()?)
    }
}
