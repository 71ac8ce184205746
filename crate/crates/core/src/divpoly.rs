//! Division polynomials evaluated at a point, and the elliptic divisibility
//! sequences they produce.

use std::collections::HashMap;

use crate::curves::{CurvePoint, WeierstrassModel};
use crate::error::{Error, Result};
use crate::numbers::{rat, ExtValuation, Rational, Scalar, Valued};
use crate::troublemaker::troublemaker;

/// `(Ψ_n, φ_n, ω_n)` at a point, with `x([n]P) = φ_n/Ψ_n²` and
/// `y([n]P) = ω_n/Ψ_n³`.
#[derive(Clone, Debug, PartialEq)]
pub struct DivPolyTriple<F> {
    pub psi: F,
    pub phi: F,
    /// `None` only when `P` is 2-torsion and `Ψ_n(P) = 0`.
    pub omega: Option<F>,
}

/// Memoized evaluation of `Ψ_n` at a fixed affine point.
pub struct DivPolyLadder<'a, F> {
    model: &'a WeierstrassModel<F>,
    x: F,
    y: F,
    cache: HashMap<i64, F>,
}

impl<'a, F: Scalar> DivPolyLadder<'a, F> {
    pub fn new(model: &'a WeierstrassModel<F>, point: &CurvePoint<F>) -> Result<Self> {
        let (x, y) = match point {
            CurvePoint::Identity => {
                return Err(Error::InvalidArgument("division polynomials at the identity".into()))
            }
            CurvePoint::Affine { x, y } => (x.clone(), y.clone()),
        };
        let mut ladder = DivPolyLadder { model, x, y, cache: HashMap::new() };
        for (n, v) in ladder.base_values().into_iter().enumerate() {
            ladder.cache.insert(n as i64, v);
        }
        Ok(ladder)
    }

    fn int(&self, n: i64) -> F {
        self.x.int_like(n)
    }

    fn base_values(&self) -> [F; 5] {
        let inv = self.model.invariants();
        let (b2, b4, b6, b8) = (inv.b2, inv.b4, inv.b6, inv.b8);
        let x = self.x.clone();
        let n = |k| self.int(k);
        let x2 = x.square();
        let x3 = x2.clone() * x.clone();
        let x4 = x2.square();
        let psi2 = self.model.psi2(&self.x, &self.y);
        let psi3 = n(3) * x4.clone() + b2.clone() * x3.clone() + n(3) * b4.clone() * x2.clone()
            + n(3) * b6.clone() * x.clone()
            + b8.clone();
        let x5 = x4.clone() * x.clone();
        let x6 = x3.square();
        let quartic_part = n(2) * x6 + b2.clone() * x5 + n(5) * b4.clone() * x4 + n(10) * b6.clone() * x3
            + n(10) * b8.clone() * x2
            + (b2 * b8.clone() - b4.clone() * b6.clone()) * x
            + (b4 * b8 - b6.square());
        let psi4 = psi2.clone() * quartic_part;
        [n(0), n(1), psi2, psi3, psi4]
    }

    pub fn psi2(&self) -> F {
        self.cache[&2].clone()
    }

    /// `Ψ_n(P)` for any integer `n`, with `Ψ_{−n} = −Ψ_n`.
    pub fn psi(&mut self, n: i64) -> Result<F> {
        if n < 0 {
            return Ok(-self.psi(-n)?);
        }
        if let Some(v) = self.cache.get(&n) {
            return Ok(v.clone());
        }
        let m = n / 2;
        let v = if n % 2 == 1 {
            let a = self.psi(m + 2)? * self.psi(m)?.cube();
            let b = self.psi(m - 1)? * self.psi(m + 1)?.cube();
            a - b
        } else {
            let num = (self.psi(m + 2)? * self.psi(m - 1)?.square()
                - self.psi(m - 2)? * self.psi(m + 1)?.square())
                * self.psi(m)?;
            divide_by_psi2(&num, &self.psi2())?
        };
        self.cache.insert(n, v.clone());
        Ok(v)
    }

    /// `φ_n = xΨ_n² − Ψ_{n−1}Ψ_{n+1}`.
    pub fn phi(&mut self, n: i64) -> Result<F> {
        Ok(self.x.clone() * self.psi(n)?.square() - self.psi(n - 1)? * self.psi(n + 1)?)
    }

    /// `ω_n`, from `2ω_n = (Ψ_{n+2}Ψ_{n−1}² − Ψ_{n−2}Ψ_{n+1}²)/Ψ_2 − a1φ_nΨ_n − a3Ψ_n³`
    /// when `Ψ_2(P) ≠ 0`, otherwise from `y([n]P)·Ψ_n³`.
    pub fn omega(&mut self, n: i64) -> Result<Option<F>> {
        let psi_n = self.psi(n)?;
        let psi2 = self.psi2();
        if !psi2.vanishes() {
            let num = self.psi(n + 2)? * self.psi(n - 1)?.square() - self.psi(n - 2)? * self.psi(n + 1)?.square();
            let two_omega = num.try_div(&psi2)?
                - self.model.a1().clone() * self.phi(n)? * psi_n.clone()
                - self.model.a3().clone() * psi_n.cube();
            return Ok(Some(two_omega.try_div(&self.int(2))?));
        }
        if psi_n.vanishes() {
            return Ok(None);
        }
        let point = CurvePoint::Affine { x: self.x.clone(), y: self.y.clone() };
        match self.model.scalar_mul(&point, n)? {
            CurvePoint::Affine { y, .. } => Ok(Some(y * psi_n.cube())),
            CurvePoint::Identity => Err(Error::InternalInconsistency(
                "nonzero division polynomial at a torsion multiple".into(),
            )),
        }
    }
}

fn divide_by_psi2<F: Scalar>(num: &F, psi2: &F) -> Result<F> {
    match num.try_div(psi2) {
        // A 2-torsion point kills every even-index term.
        Err(Error::DivisionByZero) => Ok(psi2.int_like(0)),
        other => other,
    }
}

/// Evaluate `(Ψ_n, φ_n, ω_n)` at `P` for `n ≥ 1`.
pub fn div_poly_eval<F: Scalar>(model: &WeierstrassModel<F>, point: &CurvePoint<F>, n: i64) -> Result<DivPolyTriple<F>> {
    if n < 1 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let mut ladder = DivPolyLadder::new(model, point)?;
    Ok(DivPolyTriple { psi: ladder.psi(n)?, phi: ladder.phi(n)?, omega: ladder.omega(n)? })
}

/// `[n]P` as `(φ_n/Ψ_n², ω_n/Ψ_n³)`.
pub fn multiple_via_divpoly<F: Scalar>(
    model: &WeierstrassModel<F>,
    point: &CurvePoint<F>,
    n: i64,
) -> Result<CurvePoint<F>> {
    let t = div_poly_eval(model, point, n)?;
    if t.psi.vanishes() {
        return Err(Error::TorsionMultiple(n));
    }
    let x = t.phi.try_div(&t.psi.square())?;
    let omega = t.omega.ok_or_else(|| Error::InternalInconsistency("missing ω".into()))?;
    let y = omega.try_div(&t.psi.cube())?;
    Ok(CurvePoint::Affine { x, y })
}

/// Terms `W_0 = 0, W_1, …, W_N` of an elliptic divisibility sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct EdsSequence<F> {
    terms: Vec<F>,
}

impl<F: Scalar> EdsSequence<F> {
    /// Wrap explicit terms `W_1..W_N`.
    pub fn from_terms(w1_to_wn: Vec<F>) -> Result<Self> {
        let first = w1_to_wn.first().ok_or_else(|| Error::InvalidArgument("empty sequence".into()))?;
        let mut terms = vec![first.int_like(0)];
        terms.extend(w1_to_wn);
        Ok(EdsSequence { terms })
    }

    /// Largest available index `N`.
    pub fn len(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `W_n` for `|n| ≤ N`, using `W_{−n} = −W_n`.
    pub fn get(&self, n: i64) -> Option<F> {
        let k = n.unsigned_abs() as usize;
        let v = self.terms.get(k)?.clone();
        Some(if n < 0 { -v } else { v })
    }

    /// `W_1..W_N`.
    pub fn terms(&self) -> &[F] {
        &self.terms[1..]
    }
}

impl<F: Valued> EdsSequence<F> {
    /// `v_p(W_n)` for `n = 1..N`.
    pub fn valuations(&self, p: u64) -> Result<Vec<ExtValuation>> {
        self.terms()
            .iter()
            .enumerate()
            .map(|(i, w)| {
                w.valuation(p).map_err(|e| match e {
                    Error::PrecisionExhausted(msg) => {
                        Error::PrecisionExhausted(format!("term {}: {msg}", i + 1))
                    }
                    other => other,
                })
            })
            .collect()
    }
}

/// `W_1..W_N` for `(E, P)` via the division-polynomial recurrences.
pub fn eds<F: Scalar>(model: &WeierstrassModel<F>, point: &CurvePoint<F>, n_max: usize) -> Result<EdsSequence<F>> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let mut ladder = DivPolyLadder::new(model, point)?;
    let mut terms = Vec::with_capacity(n_max + 1);
    // Filling in index order means every recursive call is a cache hit.
    for n in 0..=n_max as i64 {
        terms.push(ladder.psi(n)?);
    }
    Ok(EdsSequence { terms })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IdentityKind {
    /// `W_{n+m}W_{n−m}W_r² + W_{m+r}W_{m−r}W_n² + W_{r+n}W_{r−n}W_m² = 0`.
    ThreeTerm,
    /// `Ψ_{n+m+s}Ψ_{n−m}Ψ_{r+s}Ψ_r + Ψ_{m+r+s}Ψ_{m−r}Ψ_{n+s}Ψ_n + Ψ_{r+n+s}Ψ_{r−n}Ψ_{m+s}Ψ_m = 0`.
    FourTerm,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityViolation {
    pub kind: IdentityKind,
    pub indices: Vec<i64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IdentityReport {
    pub three_term_checked: usize,
    pub four_term_checked: usize,
    pub violations: Vec<IdentityViolation>,
}

impl IdentityReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check both sequence identities for every index tuple whose terms lie
/// within `|k| ≤ max_index` (three-term: all signs; four-term: non-negative
/// parameters).
pub fn check_eds_identities<F: Scalar>(seq: &EdsSequence<F>, max_index: usize) -> Result<IdentityReport> {
    let m_max = max_index.min(seq.len()) as i64;
    let w = |k: i64| seq.get(k).expect("index within range");
    let mut report = IdentityReport::default();
    let inside = |k: i64| k.abs() <= m_max;
    for n in -m_max..=m_max {
        for m in -m_max..=m_max {
            for r in -m_max..=m_max {
                if ![n + m, n - m, m + r, m - r, r + n, r - n].iter().all(|&k| inside(k)) {
                    continue;
                }
                let lhs = w(n + m) * w(n - m) * w(r).square()
                    + w(m + r) * w(m - r) * w(n).square()
                    + w(r + n) * w(r - n) * w(m).square();
                report.three_term_checked += 1;
                if !lhs.vanishes() {
                    report.violations.push(IdentityViolation { kind: IdentityKind::ThreeTerm, indices: vec![n, m, r] });
                }
            }
        }
    }
    for n in 0..=m_max {
        for m in 0..=m_max {
            for r in 0..=m_max {
                for s in 0..=m_max {
                    if ![n + m + s, m + r + s, r + n + s].iter().all(|&k| inside(k)) {
                        continue;
                    }
                    let lhs = w(n + m + s) * w(n - m) * w(r + s) * w(r)
                        + w(m + r + s) * w(m - r) * w(n + s) * w(n)
                        + w(r + n + s) * w(r - n) * w(m + s) * w(m);
                    report.four_term_checked += 1;
                    if !lhs.vanishes() {
                        report
                            .violations
                            .push(IdentityViolation { kind: IdentityKind::FourTerm, indices: vec![n, m, r, s] });
                    }
                }
            }
        }
    }
    Ok(report)
}

/// The curve with a rational 7-torsion point `(0, 0)` attached to `α`
/// (Tate normal form with `b = α³ − α²`, `c = α² − α`).
pub fn rank7_torsion_curve(alpha: &Rational) -> Result<(WeierstrassModel<Rational>, CurvePoint<Rational>)> {
    let one = rat(1);
    let b = alpha * alpha * alpha - alpha * alpha;
    let c = alpha * alpha - alpha;
    let model = WeierstrassModel::new([&one - &c, -b.clone(), -b, rat(0), rat(0)])
        .map_err(|e| Error::Construction(format!("alpha = {alpha}: {e}")))?;
    let point = CurvePoint::affine(rat(0), rat(0));
    let mut acc = CurvePoint::Identity;
    for k in 1..=7 {
        acc = model.add(&acc, &point)?;
        if acc.is_identity() != (k == 7) {
            return Err(Error::Construction(format!("(0, 0) does not have order 7 for alpha = {alpha}")));
        }
    }
    Ok((model, point))
}

/// Closed form `ε_n · α^{R_n(2,7)} · (α−1)^{R_n(1,7)}` of the order-7 torsion
/// sequence, with `ε_n = +1` for `n ≡ 1, 4, 5` and `−1` for `n ≡ 2, 3, 6 (mod 7)`.
pub fn rank7_closed_form(alpha: &Rational, n: i64) -> Result<Rational> {
    let k = n.unsigned_abs() as i64;
    let sign = match k % 7 {
        0 => return Ok(rat(0)),
        1 | 4 | 5 => 1,
        _ => -1,
    };
    let e1 = troublemaker(k, 2, 7)?;
    let e2 = troublemaker(k, 1, 7)?;
    let v = rat(sign) * num_traits::pow(alpha.clone(), e1 as usize) * num_traits::pow(alpha - rat(1), e2 as usize);
    Ok(if n < 0 { -v } else { v })
}

/// The order-7 torsion sequence computed from the curve, `W_1..W_N`.
pub fn rank7_torsion_eds(alpha: &Rational, n_max: usize) -> Result<EdsSequence<Rational>> {
    let (model, point) = rank7_torsion_curve(alpha)?;
    eds(&model, &point, n_max)
}
