use super::{CurvePoint, WeierstrassModel};
use crate::error::{Error, Result};
use crate::numbers::{require_prime, ExtValuation, Fp, Scalar, Valued};

/// Outcome of the discriminant/`c4` minimality test at a prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Minimality {
    Minimal,
    NotMinimal,
    /// `p ∈ {2, 3}` with `v_p(Δ) ≥ 12`: the test is inconclusive.
    Unknown,
}

/// A point reduced modulo `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedPoint {
    pub p: u64,
    /// Reduced coefficients `[a1, a2, a3, a4, a6]` (the reduced curve may be singular).
    pub curve: [Fp; 5],
    pub point: CurvePoint<Fp>,
    /// Both partial derivatives of the reduced equation vanish at the point.
    pub singular: bool,
    /// Order in the group of nonsingular points; `None` for a singular point.
    pub order: Option<u64>,
}

/// Largest prime for which orders are found by enumeration.
pub const MAX_ENUMERATION_PRIME: u64 = 10_000;

impl<F: Valued> WeierstrassModel<F> {
    fn check_integral(&self, p: u64) -> Result<()> {
        for c in &self.a {
            if c.valuation(p)? < 0 {
                return Err(Error::NonIntegral(p));
            }
        }
        Ok(())
    }

    pub fn is_minimal_at(&self, p: u64) -> Result<Minimality> {
        require_prime(p)?;
        self.check_integral(p)?;
        let vd = self.discriminant().valuation(p)?;
        let vc = self.c4().valuation(p)?;
        Ok(if vd < 12 || (p >= 5 && vc < 4) {
            Minimality::Minimal
        } else if p >= 5 {
            Minimality::NotMinimal
        } else {
            Minimality::Unknown
        })
    }

    /// Reduce `P` modulo `p` on a model known to be minimal at `p`.
    pub fn reduce_mod_p(&self, point: &CurvePoint<F>, p: u64) -> Result<ReducedPoint> {
        match self.is_minimal_at(p)? {
            Minimality::Minimal => {}
            Minimality::NotMinimal => return Err(Error::NotMinimal(p)),
            Minimality::Unknown => return Err(Error::MinimalityUnknown(p)),
        }
        let mut curve = [Fp::from_residue(0, p); 5];
        for (slot, c) in curve.iter_mut().zip(&self.a) {
            *slot = Fp::from_residue(c.residue(p)?, p);
        }
        let reduced = WeierstrassModel::new_unchecked(curve);
        let rp = match point {
            CurvePoint::Identity => CurvePoint::Identity,
            CurvePoint::Affine { x, .. } if x.valuation(p)? < 0 => CurvePoint::Identity,
            CurvePoint::Affine { x, y } => CurvePoint::Affine {
                x: Fp::from_residue(x.residue(p)?, p),
                y: Fp::from_residue(y.residue(p)?, p),
            },
        };
        let singular = match &rp {
            CurvePoint::Identity => false,
            CurvePoint::Affine { x, y } => {
                let [a1, a2, _, a4, _] = curve;
                let fx = a1 * *y - x.int_like(3) * *x * *x - x.int_like(2) * a2 * *x - a4;
                let fy = reduced.psi2(x, y);
                fx.vanishes() && fy.vanishes()
            }
        };
        let order = if singular {
            None
        } else {
            Some(reduced_order(&reduced, &rp, p)?)
        };
        Ok(ReducedPoint { p, curve, point: rp, singular, order })
    }

    /// `v_p(x(P)) − v_p(y(P))`, which is `−v_p(x(P))/2` for points reducing
    /// to the identity. `∞` for the identity itself.
    pub fn theta_valuation(&self, point: &CurvePoint<F>, p: u64) -> Result<ExtValuation> {
        match point {
            CurvePoint::Identity => Ok(ExtValuation::Infinite),
            CurvePoint::Affine { x, y } => {
                let vx = x.valuation(p)?;
                if vx >= 0 {
                    return Err(Error::InvalidArgument(format!(
                        "point does not reduce to the identity modulo {p}"
                    )));
                }
                let vy = y.valuation(p)?;
                match (vx, vy) {
                    (ExtValuation::Finite(a), ExtValuation::Finite(b)) => Ok(ExtValuation::Finite(a - b)),
                    _ => Err(Error::InternalInconsistency("infinite coordinate valuation".into())),
                }
            }
        }
    }
}

fn reduced_order(curve: &WeierstrassModel<Fp>, p0: &CurvePoint<Fp>, p: u64) -> Result<u64> {
    if p > MAX_ENUMERATION_PRIME {
        return Err(Error::ResourceLimit(format!(
            "reduced point order by enumeration needs p <= {MAX_ENUMERATION_PRIME}"
        )));
    }
    let mut acc = p0.clone();
    let mut n = 1;
    // The nonsingular points number at most 2p + 1.
    while !acc.is_identity() {
        acc = curve.add(&acc, p0)?;
        n += 1;
        if n > 2 * p + 2 {
            return Err(Error::InternalInconsistency("reduced point order exceeds group size".into()));
        }
    }
    Ok(n)
}
