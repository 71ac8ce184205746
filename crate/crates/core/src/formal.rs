//! Formal groups of Weierstrass models as truncated power series, the
//! multiplication-by-`m` series, and the sequences `S_n(p, b, d, h, s, w)`.

use serde::Serialize;

use crate::curves::{CurvePoint, WeierstrassModel};
use crate::error::{Error, Result};
use crate::numbers::{require_prime, vp, vp_int, ExtValuation, Fp, Rational, Scalar, Valued};

/// Ring operations shared by univariate and bivariate truncated series, so the
/// group law is written once.
trait SeriesRing: Sized + Clone {
    type Coeff: Scalar;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn scale(&self, c: &Self::Coeff) -> Self;
    /// The constant `c` with the same shape and precision as `self`.
    fn constant(&self, c: &Self::Coeff) -> Self;
    /// Inverse of a series whose constant term is invertible.
    fn inverse(&self) -> Result<Self>;

    fn neg(&self) -> Self {
        self.constant(&self.zero_coeff()).sub(self)
    }

    fn zero_coeff(&self) -> Self::Coeff;
}

/// `c_0 + c_1 T + … + c_{D} T^{D} + O(T^{D+1})`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSeries<F> {
    /// Always nonempty; `coeffs.len()` is the precision `D + 1`.
    coeffs: Vec<F>,
}

impl<F: Scalar> PowerSeries<F> {
    /// A series from its coefficients `c_0, c_1, …`; the precision is the length.
    pub fn new(coeffs: Vec<F>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("a power series needs at least one coefficient".into()));
        }
        Ok(PowerSeries { coeffs })
    }

    /// `T + O(T^{degree+1})` with coefficients in the domain of `template`.
    pub fn variable(template: &F, degree: usize) -> Self {
        let mut coeffs = vec![template.int_like(0); degree + 1];
        if degree >= 1 {
            coeffs[1] = template.int_like(1);
        }
        PowerSeries { coeffs }
    }

    /// Highest degree carried.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> Option<&F> {
        self.coeffs.get(k)
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn truncate(&self, degree: usize) -> Self {
        let n = (degree + 1).min(self.coeffs.len());
        PowerSeries { coeffs: self.coeffs[..n].to_vec() }
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(&F, &F) -> F) -> Self {
        let n = self.coeffs.len().min(rhs.coeffs.len());
        PowerSeries { coeffs: (0..n).map(|i| f(&self.coeffs[i], &rhs.coeffs[i])).collect() }
    }

    /// `self(inner(T))`; `inner` must have no constant term.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if !inner.coeffs[0].vanishes() {
            return Err(Error::InvalidArgument("inner series has a constant term".into()));
        }
        let degree = self.degree().min(inner.degree());
        let inner = inner.truncate(degree);
        let mut acc = inner.constant(&self.coeffs[self.degree()]);
        for c in self.coeffs[..self.degree()].iter().rev() {
            acc = acc.mul(&inner).add(&inner.constant(c));
        }
        Ok(acc.truncate(degree))
    }
}

impl<F: Scalar> SeriesRing for PowerSeries<F> {
    type Coeff = F;

    fn add(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, |a, b| a.clone() + b.clone())
    }

    fn sub(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, |a, b| a.clone() - b.clone())
    }

    fn mul(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().min(rhs.coeffs.len());
        let zero = self.zero_coeff();
        let mut out = vec![zero; n];
        for (i, a) in self.coeffs[..n].iter().enumerate() {
            if a.vanishes() {
                continue;
            }
            for (j, b) in rhs.coeffs[..n - i].iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        PowerSeries { coeffs: out }
    }

    fn scale(&self, c: &F) -> Self {
        PowerSeries { coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect() }
    }

    fn constant(&self, c: &F) -> Self {
        let mut coeffs = vec![self.zero_coeff(); self.coeffs.len()];
        coeffs[0] = c.clone();
        PowerSeries { coeffs }
    }

    fn inverse(&self) -> Result<Self> {
        let one = self.coeffs[0].int_like(1);
        let inv0 = one.try_div(&self.coeffs[0])?;
        let n = self.coeffs.len();
        let mut out = vec![self.zero_coeff(); n];
        out[0] = inv0.clone();
        for k in 1..n {
            let mut acc = self.zero_coeff();
            for i in 1..=k {
                acc = acc + self.coeffs[i].clone() * out[k - i].clone();
            }
            out[k] = -(acc * inv0.clone());
        }
        Ok(PowerSeries { coeffs: out })
    }

    fn zero_coeff(&self) -> F {
        self.coeffs[0].int_like(0)
    }
}

/// `Σ c_{ij} X^i Y^j` over `i + j ≤ D`.
#[derive(Clone, Debug, PartialEq)]
pub struct BiSeries<F> {
    degree: usize,
    /// `c[i][j]` for `i + j ≤ degree`.
    c: Vec<Vec<F>>,
}

impl<F: Scalar> BiSeries<F> {
    fn zeros(template: &F, degree: usize) -> Self {
        let c = (0..=degree).map(|i| vec![template.int_like(0); degree + 1 - i]).collect();
        BiSeries { degree, c }
    }

    /// The variable `X` (or `Y` when `second` is set).
    pub fn variable(template: &F, degree: usize, second: bool) -> Self {
        let mut s = Self::zeros(template, degree);
        if degree >= 1 {
            if second {
                s.c[0][1] = template.int_like(1);
            } else {
                s.c[1][0] = template.int_like(1);
            }
        }
        s
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficient of `X^i Y^j`, if within the total degree.
    pub fn coeff(&self, i: usize, j: usize) -> Option<&F> {
        self.c.get(i).and_then(|row| row.get(j))
    }

    /// Substitute univariate series for `X` and `Y`; both must have no constant term.
    pub fn eval(&self, x: &PowerSeries<F>, y: &PowerSeries<F>) -> Result<PowerSeries<F>> {
        if !x.coeffs[0].vanishes() || !y.coeffs[0].vanishes() {
            return Err(Error::InvalidArgument("substituted series must have no constant term".into()));
        }
        let deg = x.degree().min(y.degree());
        let (x, y) = (x.truncate(deg), y.truncate(deg));
        let one = x.constant(&x.coeffs[0].int_like(1));
        let mut xp = vec![one.clone()];
        let mut yp = vec![one];
        for k in 1..=self.degree.min(deg) {
            xp.push(xp[k - 1].mul(&x));
            yp.push(yp[k - 1].mul(&y));
        }
        let mut acc = x.constant(&x.zero_coeff());
        for (i, row) in self.c.iter().enumerate().take(xp.len()) {
            for (j, c) in row.iter().enumerate().take(yp.len()) {
                if i + j > deg || c.vanishes() {
                    continue;
                }
                acc = acc.add(&xp[i].mul(&yp[j]).scale(c));
            }
        }
        Ok(acc)
    }

    /// Swap the roles of `X` and `Y`.
    pub fn swapped(&self) -> Self {
        let mut s = Self::zeros(&self.c[0][0], self.degree);
        for (i, row) in self.c.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                s.c[j][i] = v.clone();
            }
        }
        s
    }
}

impl<F: Scalar> SeriesRing for BiSeries<F> {
    type Coeff = F;

    fn add(&self, rhs: &Self) -> Self {
        let mut s = self.clone();
        for (i, row) in s.c.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = v.clone() + rhs.c[i][j].clone();
            }
        }
        s
    }

    fn sub(&self, rhs: &Self) -> Self {
        let mut s = self.clone();
        for (i, row) in s.c.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = v.clone() - rhs.c[i][j].clone();
            }
        }
        s
    }

    fn mul(&self, rhs: &Self) -> Self {
        let d = self.degree;
        let mut s = Self::zeros(&self.c[0][0], d);
        for (i1, row1) in self.c.iter().enumerate() {
            for (j1, a) in row1.iter().enumerate() {
                if a.vanishes() {
                    continue;
                }
                for (i2, row2) in rhs.c.iter().enumerate().take(d + 1 - i1 - j1) {
                    for (j2, b) in row2.iter().enumerate().take(d + 1 - i1 - j1 - i2) {
                        let slot = &mut s.c[i1 + i2][j1 + j2];
                        *slot = slot.clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        s
    }

    fn scale(&self, c: &F) -> Self {
        let mut s = self.clone();
        for v in s.c.iter_mut().flatten() {
            *v = v.clone() * c.clone();
        }
        s
    }

    fn constant(&self, c: &F) -> Self {
        let mut s = Self::zeros(&self.c[0][0], self.degree);
        s.c[0][0] = c.clone();
        s
    }

    fn inverse(&self) -> Result<Self> {
        // u = c0(1 + m) with m nilpotent to the truncation degree.
        let c0 = self.c[0][0].clone();
        let inv0 = c0.int_like(1).try_div(&c0)?;
        let m = self.scale(&inv0).sub(&self.constant(&c0.int_like(1)));
        let one = self.constant(&c0.int_like(1));
        let mut acc = one.clone();
        for _ in 0..self.degree {
            acc = one.sub(&m.mul(&acc));
        }
        Ok(acc.scale(&inv0))
    }

    fn zero_coeff(&self) -> F {
        self.c[0][0].int_like(0)
    }
}

/// The expansion `w(z) = z³ + a1 z⁴ + …` of `w = −1/y` in terms of `z = −x/y`,
/// through degree `degree`.
pub fn w_series<F: Scalar>(model: &WeierstrassModel<F>, degree: usize) -> PowerSeries<F> {
    let [a1, a2, a3, a4, a6] = model.coefficients().clone();
    let z = PowerSeries::variable(&a1, degree);
    let z2 = z.mul(&z);
    let z3 = z2.mul(&z);
    let mut w = z.constant(&a1.int_like(0));
    // Each pass fixes at least one more coefficient.
    for _ in 0..degree.saturating_sub(2) {
        let w2 = w.mul(&w);
        let w3 = w2.mul(&w);
        w = z3
            .add(&z.mul(&w).scale(&a1))
            .add(&z2.mul(&w).scale(&a2))
            .add(&w2.scale(&a3))
            .add(&z.mul(&w2).scale(&a4))
            .add(&w3.scale(&a6));
    }
    w
}

/// `F(z1, z2)` computed in any series ring, given `w(z)` one degree beyond the
/// working precision (the slope `λ` of degree `D` needs the coefficient of `z^{D+1}`).
fn group_law<R: SeriesRing>(coeffs: &[R::Coeff; 5], w: &PowerSeries<R::Coeff>, z1: &R, z2: &R) -> Result<R> {
    let [a1, a2, a3, a4, a6] = coeffs;
    let int = |n: i64| a1.int_like(n);
    let zero = z1.constant(&int(0));
    let one = z1.constant(&int(1));
    let deg = w.degree();
    // w(z1), and λ = Σ A_n h_{n−1}(z1, z2) with h_k the complete homogeneous sum.
    let mut w1 = zero.clone();
    let mut lambda = zero.clone();
    let mut h = one.clone();
    let mut z2_pow = one.clone();
    let mut z1_pow = one.clone();
    for n in 1..=deg {
        z1_pow = z1_pow.mul(z1);
        z2_pow = z2_pow.mul(z2);
        let a_n = &w.coeffs[n];
        if !a_n.vanishes() {
            w1 = w1.add(&z1_pow.scale(a_n));
            lambda = lambda.add(&h.scale(a_n));
        }
        // h_n = z1·h_{n−1} + z2^n
        h = z1.mul(&h).add(&z2_pow);
    }
    let nu = w1.sub(&lambda.mul(z1));
    let l2 = lambda.mul(&lambda);
    let l3 = l2.mul(&lambda);
    let ln = lambda.mul(&nu);
    let num = lambda
        .scale(a1)
        .add(&nu.scale(a2))
        .add(&l2.scale(a3))
        .add(&ln.scale(&(int(2) * a4.clone())))
        .add(&l2.mul(&nu).scale(&(int(3) * a6.clone())));
    let den = one.add(&lambda.scale(a2)).add(&l2.scale(a4)).add(&l3.scale(a6));
    // z1, z2, z3 are the roots of the cubic cut out by the line w = λz + ν.
    let z3 = z1.neg().sub(z2).sub(&num.mul(&den.inverse()?));
    let w3 = lambda.mul(&z3).add(&nu);
    // The inverse on the formal group: i(z) = z / (−1 + a1 z + a3 w).
    let inv_den = one.neg().add(&z3.scale(a1)).add(&w3.scale(a3));
    Ok(z3.mul(&inv_den.inverse()?))
}

/// The formal group law `f(X, Y)` through total degree `degree`.
pub fn formal_group_law<F: Scalar>(model: &WeierstrassModel<F>, degree: usize) -> Result<BiSeries<F>> {
    if degree < 2 {
        return Err(Error::InvalidArgument("formal group law needs degree >= 2".into()));
    }
    let template = model.a1().clone();
    let w = w_series(model, degree + 1);
    let x = BiSeries::variable(&template, degree, false);
    let y = BiSeries::variable(&template, degree, true);
    group_law(model.coefficients(), &w, &x, &y)
}

/// Formal sum of two univariate series without constant term.
pub fn formal_add<F: Scalar>(
    model: &WeierstrassModel<F>,
    z1: &PowerSeries<F>,
    z2: &PowerSeries<F>,
) -> Result<PowerSeries<F>> {
    let degree = z1.degree().min(z2.degree());
    let w = w_series(model, degree + 1);
    group_law(model.coefficients(), &w, &z1.truncate(degree), &z2.truncate(degree))
}

/// Formal inverse of a series without constant term.
pub fn formal_negate<F: Scalar>(model: &WeierstrassModel<F>, z: &PowerSeries<F>) -> Result<PowerSeries<F>> {
    let w = w_series(model, z.degree()).compose(z)?;
    let den = z.constant(&model.a1().int_like(-1)).add(&z.scale(model.a1())).add(&w.scale(model.a3()));
    Ok(z.mul(&den.inverse()?))
}

/// `[m]T` through degree `degree`.
pub fn mult_series<F: Scalar>(model: &WeierstrassModel<F>, m: i64, degree: usize) -> Result<PowerSeries<F>> {
    if degree < 1 {
        return Err(Error::InvalidArgument("multiplication series needs degree >= 1".into()));
    }
    let t = PowerSeries::variable(model.a1(), degree);
    let zero = t.constant(&model.a1().int_like(0));
    let mut acc: Option<PowerSeries<F>> = None;
    let mut base = t.clone();
    let mut k = m.unsigned_abs();
    while k > 0 {
        if k & 1 == 1 {
            acc = Some(match acc {
                None => base.clone(),
                Some(a) => formal_add(model, &a, &base)?,
            });
        }
        k >>= 1;
        if k > 0 {
            base = formal_add(model, &base, &base)?;
        }
    }
    let out = acc.unwrap_or(zero);
    if m < 0 {
        formal_negate(model, &out)
    } else {
        Ok(out)
    }
}

/// The pair `(b, h)` of the formal-group valuation lemma read off `[p]T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BhExtract {
    pub b: u64,
    pub h: u64,
    /// No `p`-unit coefficient appeared through degree `p² + 1`.
    pub low_degree: bool,
}

fn bh_degree(p: u64) -> Result<usize> {
    p.checked_mul(p)
        .and_then(|q| usize::try_from(q + 1).ok())
        .ok_or_else(|| Error::ResourceLimit(format!("series degree p^2 + 1 for p = {p}")))
}

/// Read `(b, h)` off an exact series for `[p]T`: `b` is the first exponent whose
/// coefficient is a `p`-unit, and `h` its valuation.
pub fn extract_b_h(series: &PowerSeries<Rational>, p: u64) -> Result<BhExtract> {
    require_prime(p)?;
    let need = bh_degree(p)?;
    if series.degree() < need {
        return Err(Error::PrecisionExhausted(format!(
            "[p]T known to degree {}, need {need}",
            series.degree()
        )));
    }
    for (k, c) in series.coeffs.iter().enumerate().take(need + 1).skip(1) {
        let v = vp(c, p)?;
        if v < 0 {
            return Err(Error::NonIntegral(p));
        }
        if v == 0 {
            return Ok(BhExtract { b: k as u64, h: 0, low_degree: false });
        }
    }
    Ok(BhExtract { b: 1, h: 0, low_degree: true })
}

/// `(b, h)` for the formal group of a `p`-integral model, computed from `[p]T`
/// over `F_p` (whether a coefficient is a unit only depends on it modulo `p`).
pub fn formal_b_h<F: Valued>(model: &WeierstrassModel<F>, p: u64) -> Result<BhExtract> {
    require_prime(p)?;
    let need = bh_degree(p)?;
    let mut a = [Fp::from_residue(0, p); 5];
    for (slot, c) in a.iter_mut().zip(model.coefficients()) {
        *slot = Fp::from_residue(c.residue(p)?, p);
    }
    let reduced = WeierstrassModel::new_unchecked(a);
    if need > MAX_SERIES_DEGREE {
        return height_from_point_count(&reduced, p);
    }
    let series = mult_series(&reduced, p as i64, need)?;
    Ok(match series.coeffs.iter().position(|c| !c.vanishes()) {
        Some(k) => BhExtract { b: k as u64, h: 0, low_degree: false },
        None => BhExtract { b: 1, h: 0, low_degree: true },
    })
}

/// Largest `[p]T` expansion attempted; larger primes count points instead.
const MAX_SERIES_DEGREE: usize = 50;

/// Largest odd prime handled by point counting.
const MAX_COUNT_PRIME: u64 = 100_000;

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % p as u128) as u64;
        }
        base = ((base as u128 * base as u128) % p as u128) as u64;
        exp >>= 1;
    }
    acc
}

/// `(b, 0)` from the height of the reduced formal group: `b = p` for
/// ordinary or multiplicative reduction, `p²` when `a_p ≡ 0`, and the
/// all-zero case for additive reduction.
fn height_from_point_count(reduced: &WeierstrassModel<Fp>, p: u64) -> Result<BhExtract> {
    if p > MAX_COUNT_PRIME {
        return Err(Error::ResourceLimit(format!("point count modulo {p}")));
    }
    let [a1, a2, a3, a4, a6] = reduced.coefficients().map(|c| c.value());
    let (b2, b4, b6) = (a1 * a1 + 4 * a2, 2 * a4 + a1 * a3, a3 * a3 + 4 * a6);
    let (b2, b4, b6) = (b2 % p, b4 % p, b6 % p);
    let b8 = (a1 * a1 % p * a6 + 4 * a2 * a6 % p + (p - a1 * a3 % p * a4 % p) + a2 * a3 % p * a3 + (p - a4 * a4 % p)) % p;
    let disc = {
        let m = |x: u64, y: u64| x * y % p;
        let neg = |x: u64| (p - x % p) % p;
        (neg(m(m(b2, b2), b8)) + neg(m(8, m(m(b4, b4), b4))) + neg(m(27, m(b6, b6))) + m(9, m(m(b2, b4), b6))) % p
    };
    if disc != 0 {
        // y² + (a1x + a3)y = f(x) has 1 + χ((a1x + a3)² + 4f(x)) solutions.
        let mut count = 1u64;
        for x in 0..p {
            let lin = (a1 * x + a3) % p;
            let f = (x * x % p * x + a2 * x % p * x + a4 * x + a6) % p;
            let d = (lin * lin + 4 * f) % p;
            count += match d {
                0 => 1,
                _ if pow_mod(d, (p - 1) / 2, p) == 1 => 2,
                _ => 0,
            };
        }
        let trace_mod_p = (p + 1 + p - count % p) % p;
        let b = if trace_mod_p == 0 { p * p } else { p };
        return Ok(BhExtract { b, h: 0, low_degree: false });
    }
    // c4 ≢ 0: node, formal group of height one; otherwise a cusp, where [p] vanishes.
    let c4 = (b2 * b2 % p + p - 24 * b4 % p) % p;
    Ok(if c4 != 0 {
        BhExtract { b: p, h: 0, low_degree: false }
    } else {
        BhExtract { b: 1, h: 0, low_degree: true }
    })
}

/// Parameters of the sequence `S_n(p, b, d, h, s, w)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SParams {
    pub p: u64,
    pub b: u64,
    pub d: u64,
    pub h: u64,
    pub s: ExtValuation,
    pub w: ExtValuation,
}

fn geometric(b: i128, k: u32) -> Option<i128> {
    // 1 + b + … + b^{k−1}, well defined for b = 1.
    let mut acc: i128 = 0;
    let mut pw: i128 = 1;
    for _ in 0..k {
        acc = acc.checked_add(pw)?;
        pw = pw.checked_mul(b)?;
    }
    Some(acc)
}

impl SParams {
    pub fn new(p: u64, b: u64, d: u64, h: u64, s: ExtValuation, w: ExtValuation) -> Result<Self> {
        let out = SParams { p, b, d, h, s, w };
        out.validate()?;
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        require_prime(self.p)?;
        if !(self.b == 1 || (self.b > 0 && self.b.is_multiple_of(self.p))) {
            return Err(Error::InvalidArgument(format!("b = {} is neither 1 nor a multiple of p", self.b)));
        }
        if self.d == 0 {
            return Err(Error::InvalidArgument("d must be positive".into()));
        }
        if let ExtValuation::Finite(s) = self.s {
            if s <= 0 {
                return Err(Error::InvalidArgument("s must be positive".into()));
            }
        }
        if let ExtValuation::Finite(w) = self.w {
            if w < 0 {
                return Err(Error::InvalidArgument("w must be nonnegative".into()));
            }
        }
        Ok(())
    }

    /// The step index `j`.
    pub fn j(&self) -> Result<u32> {
        let s = match self.s {
            _ if self.b == 1 => return Ok(0),
            ExtValuation::Infinite => return Ok(0),
            ExtValuation::Finite(s) => s as i128,
        };
        let b = self.b as i128;
        let base = (b - 1) * s + self.h as i128;
        let mut j = 0u32;
        let mut lhs = base;
        while lhs < self.d as i128 {
            j += 1;
            lhs = lhs.checked_mul(b).ok_or_else(|| Error::InvalidArgument("j overflows".into()))?;
        }
        Ok(j)
    }

    /// `S_n` with `n` replaced by `k` for its `p`-adic exponent `u(n) = k`.
    pub fn at_exponent(&self, u: u32) -> Result<ExtValuation> {
        self.validate()?;
        let s = match self.s {
            ExtValuation::Infinite => return Ok(ExtValuation::Infinite),
            ExtValuation::Finite(s) => s as i128,
        };
        let j = self.j()?;
        let b = self.b as i128;
        let ovf = || Error::InvalidArgument("S_n overflows".into());
        let head = |k: u32| -> Result<i128> {
            let bk = b.checked_pow(k).ok_or_else(ovf)?;
            let g = geometric(b, k).ok_or_else(ovf)?;
            bk.checked_mul(s)
                .and_then(|x| x.checked_add(g.checked_mul(self.h as i128)?))
                .ok_or_else(ovf)
        };
        let v = if u > j {
            let w = match self.w {
                ExtValuation::Infinite => return Ok(ExtValuation::Infinite),
                ExtValuation::Finite(w) => w as i128,
            };
            head(j)? + (self.d as i128) * ((u - j) as i128) + w
        } else {
            head(u)?
        };
        i64::try_from(v).map(ExtValuation::Finite).map_err(|_| ovf())
    }

    /// Constants `(A, B)` with `S_n ≤ A + B·ln n` for every `n ≥ 1`; `None` when
    /// `s` or `w` is infinite.
    pub fn log_bound(&self) -> Result<Option<(f64, f64)>> {
        let (ExtValuation::Finite(_), ExtValuation::Finite(w)) = (self.s, self.w) else {
            return Ok(None);
        };
        let j = self.j()?;
        let top = self.at_exponent(j)?.finite().expect("finite s") as f64;
        Ok(Some((top + w as f64, self.d as f64 / (self.p as f64).ln())))
    }
}

/// `S_n(p, b, d, h, s, w)`.
pub fn s_eval(params: &SParams, n: u64) -> Result<ExtValuation> {
    if n == 0 {
        return Err(Error::InvalidArgument("S_n needs n >= 1".into()));
    }
    let u = vp_int(&n.into(), params.p)?.finite().expect("n nonzero") as u32;
    params.at_exponent(u)
}

/// `v(Θ(P)) = v(x/y)` for a point in the kernel of reduction.
pub fn theta_valuation<F: Valued>(model: &WeierstrassModel<F>, point: &CurvePoint<F>, p: u64) -> Result<ExtValuation> {
    model.theta_valuation(point, p)
}
