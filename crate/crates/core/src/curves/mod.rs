//! Weierstrass models, their invariants, the group law and changes of
//! variables.

mod io;
mod local;

use crate::error::{Error, Result};
use crate::numbers::{Padic, Rational, Scalar};

pub use io::{parse_curve_json, point_to_json, CurveInput, PointInput};
pub use local::{Minimality, ReducedPoint, MAX_ENUMERATION_PRIME};

/// `y² + a1·xy + a3·y = x³ + a2·x² + a4·x + a6` with nonzero discriminant.
#[derive(Clone, Debug, PartialEq)]
pub struct WeierstrassModel<F> {
    a: [F; 5],
}

/// The standard quantities `b2, b4, b6, b8, c4, c6, Δ, j` of a model.
#[derive(Clone, Debug, PartialEq)]
pub struct Invariants<F> {
    pub b2: F,
    pub b4: F,
    pub b6: F,
    pub b8: F,
    pub c4: F,
    pub c6: F,
    pub delta: F,
    pub j: F,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CurvePoint<F> {
    Identity,
    Affine { x: F, y: F },
}

impl<F: Scalar> CurvePoint<F> {
    pub fn affine(x: F, y: F) -> Self {
        CurvePoint::Affine { x, y }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, CurvePoint::Identity)
    }

    pub fn x(&self) -> Option<&F> {
        match self {
            CurvePoint::Affine { x, .. } => Some(x),
            CurvePoint::Identity => None,
        }
    }

    pub fn y(&self) -> Option<&F> {
        match self {
            CurvePoint::Affine { y, .. } => Some(y),
            CurvePoint::Identity => None,
        }
    }
}

/// Change of variables `x = u²x' + r`, `y = u³y' + u²s·x' + t`.
///
/// Applying it to a model divides the discriminant by `u¹²`.
#[derive(Clone, Debug, PartialEq)]
pub struct Transformation<F> {
    pub u: F,
    pub r: F,
    pub s: F,
    pub t: F,
}

impl<F: Scalar> Transformation<F> {
    pub fn new(u: F, r: F, s: F, t: F) -> Result<Self> {
        if u.vanishes() {
            return Err(Error::ZeroScale);
        }
        Ok(Transformation { u, r, s, t })
    }

    /// The transformation equal to applying `self` and then `next`.
    pub fn then(&self, next: &Transformation<F>) -> Transformation<F> {
        let (u1, r1, s1, t1) = (&self.u, &self.r, &self.s, &self.t);
        let (u2, r2, s2, t2) = (&next.u, &next.r, &next.s, &next.t);
        Transformation {
            u: u1.clone() * u2.clone(),
            r: r1.clone() + u1.square() * r2.clone(),
            s: s1.clone() + u1.clone() * s2.clone(),
            t: t1.clone() + u1.square() * s1.clone() * r2.clone() + u1.cube() * t2.clone(),
        }
    }
}

impl<F: Scalar> WeierstrassModel<F> {
    /// Build a model from `[a1, a2, a3, a4, a6]`, rejecting singular ones.
    pub fn new(a: [F; 5]) -> Result<Self> {
        let m = WeierstrassModel { a };
        if m.invariants_raw().6.vanishes() {
            return Err(Error::SingularModel);
        }
        Ok(m)
    }

    /// Model without the discriminant check (used for reductions mod p).
    pub(crate) fn new_unchecked(a: [F; 5]) -> Self {
        WeierstrassModel { a }
    }

    pub fn coefficients(&self) -> &[F; 5] {
        &self.a
    }

    pub fn a1(&self) -> &F {
        &self.a[0]
    }
    pub fn a2(&self) -> &F {
        &self.a[1]
    }
    pub fn a3(&self) -> &F {
        &self.a[2]
    }
    pub fn a4(&self) -> &F {
        &self.a[3]
    }
    pub fn a6(&self) -> &F {
        &self.a[4]
    }

    fn int(&self, n: i64) -> F {
        self.a[0].int_like(n)
    }

    /// `a1 = a2 = a3 = 0`.
    pub fn is_short(&self) -> bool {
        self.a[..3].iter().all(|c| c.vanishes())
    }

    // (b2, b4, b6, b8, c4, c6, Δ)
    fn invariants_raw(&self) -> (F, F, F, F, F, F, F) {
        let [a1, a2, a3, a4, a6] = self.a.clone();
        let n = |k| self.int(k);
        let b2 = a1.square() + n(4) * a2.clone();
        let b4 = n(2) * a4.clone() + a1.clone() * a3.clone();
        let b6 = a3.square() + n(4) * a6.clone();
        let b8 = a1.square() * a6.clone() + n(4) * a2.clone() * a6 - a1 * a3.clone() * a4.clone()
            + a2 * a3.square()
            - a4.square();
        let c4 = b2.square() - n(24) * b4.clone();
        let c6 = -b2.cube() + n(36) * b2.clone() * b4.clone() - n(216) * b6.clone();
        let delta = -b2.square() * b8.clone() - n(8) * b4.cube() - n(27) * b6.square()
            + n(9) * b2.clone() * b4.clone() * b6.clone();
        (b2, b4, b6, b8, c4, c6, delta)
    }

    pub fn invariants(&self) -> Invariants<F> {
        let (b2, b4, b6, b8, c4, c6, delta) = self.invariants_raw();
        let j = c4.cube().try_div(&delta).expect("nonsingular model");
        Invariants { b2, b4, b6, b8, c4, c6, delta, j }
    }

    pub fn discriminant(&self) -> F {
        self.invariants_raw().6
    }

    pub fn c4(&self) -> F {
        self.invariants_raw().4
    }

    /// `F(x, y) = y² + a1xy + a3y − x³ − a2x² − a4x − a6`.
    pub(crate) fn equation(&self, x: &F, y: &F) -> F {
        let [a1, a2, a3, a4, a6] = self.a.clone();
        y.square() + a1 * x.clone() * y.clone() + a3 * y.clone()
            - x.cube()
            - a2 * x.square()
            - a4 * x.clone()
            - a6
    }

    pub fn contains(&self, p: &CurvePoint<F>) -> bool {
        match p {
            CurvePoint::Identity => true,
            CurvePoint::Affine { x, y } => self.equation(x, y).vanishes(),
        }
    }

    /// Checked point constructor.
    pub fn point(&self, x: F, y: F) -> Result<CurvePoint<F>> {
        let p = CurvePoint::Affine { x, y };
        if self.contains(&p) {
            Ok(p)
        } else {
            Err(Error::NotOnCurve)
        }
    }

    /// `2y + a1x + a3`, the value of the second division polynomial.
    pub fn psi2(&self, x: &F, y: &F) -> F {
        self.int(2) * y.clone() + self.a[0].clone() * x.clone() + self.a[2].clone()
    }

    pub fn negate(&self, p: &CurvePoint<F>) -> CurvePoint<F> {
        match p {
            CurvePoint::Identity => CurvePoint::Identity,
            CurvePoint::Affine { x, y } => CurvePoint::Affine {
                x: x.clone(),
                y: -y.clone() - self.a[0].clone() * x.clone() - self.a[2].clone(),
            },
        }
    }

    pub fn add(&self, p: &CurvePoint<F>, q: &CurvePoint<F>) -> Result<CurvePoint<F>> {
        let (x1, y1, x2, y2) = match (p, q) {
            (CurvePoint::Identity, _) => return Ok(q.clone()),
            (_, CurvePoint::Identity) => return Ok(p.clone()),
            (CurvePoint::Affine { x: x1, y: y1 }, CurvePoint::Affine { x: x2, y: y2 }) => {
                (x1, y1, x2, y2)
            }
        };
        let [a1, a2, a3, a4, a6] = self.a.clone();
        let (lambda, nu) = if (x1.clone() - x2.clone()).vanishes() {
            if (y1.clone() + y2.clone() + a1.clone() * x2.clone() + a3.clone()).vanishes() {
                return Ok(CurvePoint::Identity);
            }
            let den = self.psi2(x1, y1);
            let lam = (self.int(3) * x1.square() + self.int(2) * a2.clone() * x1.clone() + a4.clone()
                - a1.clone() * y1.clone())
            .try_div(&den)?;
            let nu = (-x1.cube() + a4 * x1.clone() + self.int(2) * a6 - a3.clone() * y1.clone())
                .try_div(&den)?;
            (lam, nu)
        } else {
            let den = x2.clone() - x1.clone();
            let lam = (y2.clone() - y1.clone()).try_div(&den)?;
            let nu = (y1.clone() * x2.clone() - y2.clone() * x1.clone()).try_div(&den)?;
            (lam, nu)
        };
        let x3 = lambda.square() + a1.clone() * lambda.clone() - a2 - x1.clone() - x2.clone();
        let y3 = -(lambda + a1) * x3.clone() - nu - a3;
        Ok(CurvePoint::Affine { x: x3, y: y3 })
    }

    pub fn double(&self, p: &CurvePoint<F>) -> Result<CurvePoint<F>> {
        self.add(p, p)
    }

    /// `[n]P` by double-and-add; negative `n` negates.
    pub fn scalar_mul(&self, p: &CurvePoint<F>, n: i64) -> Result<CurvePoint<F>> {
        let mut acc = CurvePoint::Identity;
        let mut base = if n < 0 { self.negate(p) } else { p.clone() };
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base)?;
            }
            k >>= 1;
            if k > 0 {
                base = self.double(&base)?;
            }
        }
        Ok(acc)
    }

    /// The model in the new coordinates of `t`.
    pub fn transform(&self, t: &Transformation<F>) -> Result<WeierstrassModel<F>> {
        let [a1, a2, a3, a4, a6] = self.a.clone();
        let Transformation { u, r, s, t } = t.clone();
        let n = |k| self.int(k);
        let a1n = a1.clone() + n(2) * s.clone();
        let a2n = a2.clone() - s.clone() * a1.clone() + n(3) * r.clone() - s.square();
        let a3n = a3.clone() + r.clone() * a1.clone() + n(2) * t.clone();
        let a4n = a4.clone() - s.clone() * a3.clone() + n(2) * r.clone() * a2.clone()
            - (t.clone() + r.clone() * s.clone()) * a1.clone()
            + n(3) * r.square()
            - n(2) * s * t.clone();
        let a6n = a6 + r.clone() * a4 + r.square() * a2 + r.cube()
            - t.clone() * a3
            - t.square()
            - r * t * a1;
        let u2 = u.square();
        let u3 = u2.clone() * u.clone();
        let u4 = u2.square();
        let u6 = u3.square();
        WeierstrassModel::new([
            a1n.try_div(&u)?,
            a2n.try_div(&u2)?,
            a3n.try_div(&u3)?,
            a4n.try_div(&u4)?,
            a6n.try_div(&u6)?,
        ])
    }

    /// Image of a point of `self` on `self.transform(t)`.
    pub fn transform_point(&self, p: &CurvePoint<F>, t: &Transformation<F>) -> Result<CurvePoint<F>> {
        match p {
            CurvePoint::Identity => Ok(CurvePoint::Identity),
            CurvePoint::Affine { x, y } => {
                let xr = x.clone() - t.r.clone();
                let xn = xr.try_div(&t.u.square())?;
                let yn = (y.clone() - t.s.clone() * xr - t.t.clone()).try_div(&t.u.cube())?;
                Ok(CurvePoint::Affine { x: xn, y: yn })
            }
        }
    }
}

impl WeierstrassModel<Rational> {
    /// Rational model from decimal strings `[a1, a2, a3, a4, a6]`.
    pub fn from_strs(a: [&str; 5]) -> Result<Self> {
        let mut out = Vec::with_capacity(5);
        for s in a {
            out.push(crate::numbers::parse_rational(s)?);
        }
        let a: [Rational; 5] = out.try_into().expect("five coefficients");
        WeierstrassModel::new(a)
    }

    /// True when every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.a.iter().all(|c| c.is_integer())
    }

    /// The same model over `Q_p` with `prec` digits per coefficient.
    pub fn to_padic(&self, p: u64, prec: u32) -> Result<WeierstrassModel<Padic>> {
        let mut out = Vec::with_capacity(5);
        for c in &self.a {
            out.push(Padic::from_rational(c, p, prec)?);
        }
        WeierstrassModel::new(out.try_into().expect("five coefficients"))
    }
}

impl CurvePoint<Rational> {
    pub fn to_padic(&self, p: u64, prec: u32) -> Result<CurvePoint<Padic>> {
        Ok(match self {
            CurvePoint::Identity => CurvePoint::Identity,
            CurvePoint::Affine { x, y } => CurvePoint::Affine {
                x: Padic::from_rational(x, p, prec)?,
                y: Padic::from_rational(y, p, prec)?,
            },
        })
    }
}
