//! Reduction types at a prime, the parameters of the closed-form valuation
//! formulas, fitting them where they cannot be measured, and verification
//! against directly computed valuations.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::curves::{CurvePoint, WeierstrassModel};
use crate::divpoly::eds;
use crate::error::{Error, Result};
use crate::formal::{formal_b_h, s_eval, SParams};
use crate::numbers::{format_rational, rat, vp_int, ExtValuation, Rational, Valued};
use crate::troublemaker::troublemaker;

pub use crate::troublemaker::square_one_pairs;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ReductionType {
    Good,
    Multiplicative,
    AdditivePotGood,
    AdditivePotMult,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PointStatus {
    NonsingularReduction,
    SingularReduction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ReductionClass {
    pub reduction: ReductionType,
    pub point: PointStatus,
    /// Order of the reduced point, for nonsingular reduction.
    pub reduced_order: Option<u64>,
}

/// Where a parameter value came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Provenance {
    /// Computed from the point's multiples.
    Measured,
    /// Read off the model's invariants.
    Invariant,
    /// Forced by the reduction type.
    Fixed,
    /// Chosen to reproduce valuations in the fit window.
    Fitted,
}

fn ser_rational<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(q))
}

/// Everything needed to predict `v(W_n)` at one prime.
///
/// The prediction is
/// `v(W_n) = r_P(n²−1) + (quad_offset·(n²−1) + inner_n) / d` with
/// `inner_n = x_coeff·n² + R_n(a_P, ℓ_P) + [n_P | n]·S_{n/n_P}(p, b_P, d, h_P, s_P, w_P)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClosedFormParams {
    pub p: u64,
    pub class: ReductionClass,
    /// Ramification degree of the extension where the model becomes good or
    /// multiplicative; 1 when no extension is needed.
    pub d: u64,
    #[serde(serialize_with = "ser_rational")]
    pub quad_offset: Rational,
    /// Extra `(n²−1)` offset for a non-minimal source model.
    pub r_p: i64,
    #[serde(serialize_with = "ser_rational")]
    pub x_coeff: Rational,
    /// Component index; 0 for nonsingular reduction.
    pub a_p: u64,
    /// 0 when there is no troublemaker term.
    pub ell_p: u64,
    pub n_p: u64,
    pub s_p: ExtValuation,
    pub w_p: ExtValuation,
    pub b_p: u64,
    pub h_p: u64,
    pub provenance: BTreeMap<String, Provenance>,
}

impl ClosedFormParams {
    pub fn s_params(&self) -> Result<SParams> {
        SParams::new(self.p, self.b_p, self.d, self.h_p, self.s_p, self.w_p)
    }
}

struct LocalData {
    v_delta: i64,
    v_c4: ExtValuation,
    /// `v(j) = 3v(c4) − v(Δ)`; `∞` when `c4 = 0`.
    v_j: ExtValuation,
}

fn local_data<F: Valued>(model: &WeierstrassModel<F>, p: u64) -> Result<LocalData> {
    let v_delta = model
        .discriminant()
        .valuation(p)?
        .finite()
        .ok_or_else(|| Error::InternalInconsistency("zero discriminant".into()))?;
    let v_c4 = model.c4().valuation(p)?;
    let v_j = match v_c4 {
        ExtValuation::Finite(c) => ExtValuation::Finite(3 * c - v_delta),
        ExtValuation::Infinite => ExtValuation::Infinite,
    };
    Ok(LocalData { v_delta, v_c4, v_j })
}

/// Reduction type of the model and reduction status of the point at `p`.
pub fn classify<F: Valued>(model: &WeierstrassModel<F>, point: &CurvePoint<F>, p: u64) -> Result<ReductionClass> {
    let reduced = model.reduce_mod_p(point, p)?;
    let ld = local_data(model, p)?;
    let reduction = if ld.v_delta == 0 {
        ReductionType::Good
    } else if ld.v_c4 == 0 {
        ReductionType::Multiplicative
    } else if ld.v_j >= 0 {
        ReductionType::AdditivePotGood
    } else {
        ReductionType::AdditivePotMult
    };
    let status = if reduced.singular {
        PointStatus::SingularReduction
    } else {
        PointStatus::NonsingularReduction
    };
    Ok(ReductionClass { reduction, point: status, reduced_order: reduced.order })
}

fn sq(n: u64) -> Rational {
    rat(n as i64) * rat(n as i64)
}

/// The closed-form value of `v(W_n)`.
pub fn predict(params: &ClosedFormParams, n: u64) -> Result<ExtValuation> {
    if n == 0 {
        return Err(Error::InvalidArgument("prediction needs n >= 1".into()));
    }
    if params.n_p == 0 || params.d == 0 {
        return Err(Error::InvalidArgument("incomplete parameters".into()));
    }
    let n2 = sq(n);
    let mut inner = &params.x_coeff * &n2;
    if params.ell_p > 0 {
        inner += rat(troublemaker(n as i64, params.a_p as i64, params.ell_p as i64)?);
    }
    if n.is_multiple_of(params.n_p) {
        match s_eval(&params.s_params()?, n / params.n_p)? {
            ExtValuation::Infinite => return Ok(ExtValuation::Infinite),
            ExtValuation::Finite(v) => inner += rat(v),
        }
    }
    let m = &n2 - rat(1);
    let total = (&params.quad_offset * &m + inner) / rat(params.d as i64) + rat(params.r_p) * m;
    if !total.is_integer() {
        return Err(Error::InternalInconsistency(format!(
            "predicted v(W_{n}) = {} is not an integer",
            format_rational(&total)
        )));
    }
    let v = total.to_integer();
    i64::try_from(v)
        .map(ExtValuation::Finite)
        .map_err(|_| Error::InternalInconsistency("prediction overflows".into()))
}

fn u_of(m: u64, p: u64) -> u32 {
    vp_int(&m.into(), p).ok().and_then(|v| v.finite()).unwrap_or(0) as u32
}

/// Inner `S` parameters fitted to `values[m−1] = S_m`.
struct SFit {
    s: ExtValuation,
    b: u64,
    h: u64,
    w: ExtValuation,
}

/// Fit `(s, b, h, w)` of `S_m(p, b, d, h, s, w)` to observed values. The
/// first match in the order (b, h) ascending wins, so parameters the data
/// cannot see take their smallest admissible value.
fn fit_s(values: &[ExtValuation], p: u64, d: u64, fixed_bh: Option<(u64, u64)>) -> Option<SFit> {
    let mut by_u: BTreeMap<u32, ExtValuation> = BTreeMap::new();
    for (i, v) in values.iter().enumerate() {
        let u = u_of(i as u64 + 1, p);
        if let Some(prev) = by_u.insert(u, *v) {
            if prev != *v {
                return None;
            }
        }
    }
    let s = *by_u.get(&0)?;
    if let ExtValuation::Finite(s0) = s {
        if s0 <= 0 {
            return None;
        }
    }
    let candidates: Vec<(u64, u64)> = match fixed_bh {
        Some(bh) => vec![bh],
        None => {
            let mut c = Vec::new();
            for b in std::iter::once(1).chain((1..=p).map(|k| k * p)) {
                for h in 0..d {
                    c.push((b, h));
                }
            }
            c
        }
    };
    for (b, h) in candidates {
        let Ok(base) = SParams::new(p, b, d, h, s, ExtValuation::Finite(0)) else { continue };
        let Ok(j) = base.j() else { continue };
        let w = match by_u.range(j + 1..).next() {
            None => ExtValuation::Finite(0),
            Some((&u, &obs)) => match (obs, base.at_exponent(u)) {
                (ExtValuation::Infinite, _) => ExtValuation::Infinite,
                (ExtValuation::Finite(o), Ok(ExtValuation::Finite(e))) if o >= e => ExtValuation::Finite(o - e),
                _ => continue,
            },
        };
        let sp = SParams { w, ..base };
        if by_u.iter().all(|(&u, &obs)| sp.at_exponent(u).map(|e| e == obs).unwrap_or(false)) {
            return Some(SFit { s, b, h, w });
        }
    }
    None
}

/// Nonsingular inner form: `x_coeff·n² + [n_P | n]·S_{n/n_P}`.
struct InnerFit {
    x_coeff: i64,
    n_p: u64,
    a: u64,
    s: SFit,
}

fn sub(v: ExtValuation, k: i64) -> ExtValuation {
    match v {
        ExtValuation::Finite(x) => ExtValuation::Finite(x - k),
        ExtValuation::Infinite => ExtValuation::Infinite,
    }
}

fn fit_multiples(r: &[ExtValuation], p: u64, d: u64, fixed_bh: Option<(u64, u64)>) -> Option<(u64, SFit)> {
    let n_p = r.iter().position(|v| *v != 0)? as u64 + 1;
    for (i, v) in r.iter().enumerate() {
        if !(i as u64 + 1).is_multiple_of(n_p) && *v != 0 {
            return None;
        }
    }
    let multiples: Vec<ExtValuation> = r.iter().skip(n_p as usize - 1).step_by(n_p as usize).copied().collect();
    fit_s(&multiples, p, d, fixed_bh).map(|s| (n_p, s))
}

fn fit_nonsingular_inner(r: &[ExtValuation], p: u64, d: u64) -> Option<InnerFit> {
    if r.first() != Some(&ExtValuation::Finite(0)) {
        return None;
    }
    // n_P = 1: then x_coeff = −s, and S_n = s whenever p ∤ n.
    if let Some(n0) = (2..=r.len() as u64).find(|n| n % p != 0) {
        if let ExtValuation::Finite(v) = r[n0 as usize - 1] {
            let m = (n0 * n0 - 1) as i64;
            if v < 0 && v % m == 0 {
                let s = -v / m;
                let t: Vec<ExtValuation> =
                    r.iter().enumerate().map(|(i, v)| sub(*v, -s * ((i as i64 + 1).pow(2)))).collect();
                if let Some(fit) = fit_s(&t, p, d, None) {
                    if fit.s == s {
                        return Some(InnerFit { x_coeff: -s, n_p: 1, a: 0, s: fit });
                    }
                }
            }
        }
    }
    let (n_p, s) = fit_multiples(r, p, d, None)?;
    (n_p > 1).then_some(InnerFit { x_coeff: 0, n_p, a: 0, s })
}

fn fit_singular_inner(r: &[ExtValuation], p: u64, d: u64, ell: u64) -> Option<InnerFit> {
    for a in 1..=ell / 2 {
        let e: Vec<ExtValuation> = r
            .iter()
            .enumerate()
            .map(|(i, v)| sub(*v, troublemaker(i as i64 + 1, a as i64, ell as i64).unwrap_or(i64::MAX)))
            .collect();
        if let Some((n_p, s)) = fit_multiples(&e, p, d, Some((p, 0))) {
            if n_p > 1 {
                return Some(InnerFit { x_coeff: 0, n_p, a, s });
            }
        }
    }
    None
}

/// Ramification degrees tried by the fit, smallest first.
pub const SCALE_CANDIDATES: [u64; 8] = [1, 2, 3, 4, 6, 8, 12, 24];

/// Fit the scale `d` and every inner parameter to `direct[n−1] = v(W_n)`.
///
/// The smallest `d` for which some parameter set reproduces all of `direct`
/// is returned.
pub fn fit_closed_form<F: Valued>(
    direct: &[ExtValuation],
    model: &WeierstrassModel<F>,
    point: &CurvePoint<F>,
    p: u64,
) -> Result<ClosedFormParams> {
    if direct.len() < 3 {
        return Err(Error::FitFailure("need at least three valuations".into()));
    }
    let class = classify(model, point, p)?;
    let ld = local_data(model, p)?;
    let pot_good = ld.v_j >= 0;
    for d in SCALE_CANDIDATES {
        let di = d as i64;
        let (num, den) = if pot_good {
            (di * ld.v_delta, 12)
        } else {
            (di * ld.v_c4.finite().expect("c4 nonzero when v(j) < 0"), 4)
        };
        if num % den != 0 {
            continue;
        }
        let quad = num / den;
        let r: Vec<ExtValuation> = direct
            .iter()
            .enumerate()
            .map(|(i, v)| sub(v.scale(di), quad * ((i as i64 + 1).pow(2) - 1)))
            .collect();
        let ell = if pot_good { 0 } else { (-di * ld.v_j.finite().expect("finite")) as u64 };
        let fit = fit_nonsingular_inner(&r, p, d).or_else(|| {
            if pot_good {
                None
            } else {
                fit_singular_inner(&r, p, d, ell)
            }
        });
        if let Some(f) = fit {
            let mut provenance = BTreeMap::new();
            for k in ["d", "quad_offset", "x_coeff", "n_p", "s_p", "w_p", "b_p", "h_p", "a_p"] {
                provenance.insert(k.to_string(), Provenance::Fitted);
            }
            provenance.insert("ell_p".into(), Provenance::Invariant);
            return Ok(ClosedFormParams {
                p,
                class,
                d,
                quad_offset: rat(quad),
                r_p: 0,
                x_coeff: rat(f.x_coeff),
                a_p: f.a,
                ell_p: if f.a > 0 { ell } else { 0 },
                n_p: f.n_p,
                s_p: f.s.s,
                w_p: f.s.w,
                b_p: f.s.b,
                h_p: f.s.h,
                provenance,
            });
        }
    }
    Err(Error::FitFailure(format!("no closed form with d | 24 reproduces the valuations at p = {p}")))
}

/// Default cap on the search for `n_P`.
pub fn default_probe_cap(p: u64) -> u64 {
    4 * (p + 1) * (p + 1)
}

fn first_kernel_multiple<F: Valued>(
    model: &WeierstrassModel<F>,
    point: &CurvePoint<F>,
    p: u64,
    cap: u64,
) -> Result<(u64, CurvePoint<F>)> {
    let mut q = point.clone();
    let mut n = 1;
    loop {
        match &q {
            CurvePoint::Identity => return Ok((n, q)),
            CurvePoint::Affine { x, .. } if x.valuation(p)? < 0 => return Ok((n, q)),
            _ => {}
        }
        n += 1;
        if n > cap {
            return Err(Error::ResourceLimit(format!("n_P at p = {p} exceeds the probe cap {cap}")));
        }
        q = model.add(&q, point)?;
    }
}

fn theta_or_inf<F: Valued>(model: &WeierstrassModel<F>, q: &CurvePoint<F>, p: u64) -> Result<ExtValuation> {
    model.theta_valuation(q, p)
}

/// Parameters for `(E, P)` at `p`. For good and multiplicative reduction
/// they are measured on multiples of `P` (only `a_P` is fitted, against
/// `direct`); additive cases are handed to [`fit_closed_form`].
pub fn derive_params<F: Valued>(
    model: &WeierstrassModel<F>,
    point: &CurvePoint<F>,
    p: u64,
    direct: &[ExtValuation],
    probe_cap: Option<u64>,
) -> Result<ClosedFormParams> {
    let class = classify(model, point, p)?;
    if matches!(class.reduction, ReductionType::AdditivePotGood | ReductionType::AdditivePotMult) {
        return fit_closed_form(direct, model, point, p);
    }
    let x = point
        .x()
        .ok_or_else(|| Error::InvalidArgument("the point must be affine".into()))?;
    let vx = x.valuation(p)?.finite().ok_or_else(|| Error::InvalidArgument("x(P) = 0 is not allowed here".into()));
    let x_coeff = match vx {
        Ok(v) if v < 0 => Rational::new(v.into(), 2.into()),
        _ => Rational::zero(),
    };
    let cap = probe_cap.unwrap_or_else(|| default_probe_cap(p));
    let (n_p, q) = first_kernel_multiple(model, point, p, cap)?;
    let s = theta_or_inf(model, &q, p)?;
    let singular = class.point == PointStatus::SingularReduction;
    let (b, h) = if singular {
        (p, 0)
    } else {
        let bh = formal_b_h(model, p)?;
        (bh.b, bh.h)
    };
    let base = SParams::new(p, b, 1, h, s, ExtValuation::Finite(0))?;
    let j = base.j()?;
    let w = match s {
        ExtValuation::Finite(sv) if b > 1 && (b as i64).pow(j) * ((b as i64 - 1) * sv + h as i64) == 1 => {
            let qj = model.scalar_mul(&q, (p as i64).pow(j))?;
            let qj1 = model.scalar_mul(&qj, p as i64)?;
            match (theta_or_inf(model, &qj1, p)?, theta_or_inf(model, &qj, p)?) {
                (ExtValuation::Infinite, _) => ExtValuation::Infinite,
                (ExtValuation::Finite(t1), ExtValuation::Finite(t0)) => {
                    ExtValuation::Finite(t1 - b as i64 * t0 - h as i64)
                }
                _ => return Err(Error::InternalInconsistency("identity before its multiple".into())),
            }
        }
        _ => ExtValuation::Finite(0),
    };
    let mut provenance = BTreeMap::new();
    for k in ["n_p", "s_p", "w_p", "x_coeff"] {
        provenance.insert(k.to_string(), Provenance::Measured);
    }
    provenance.insert("d".into(), Provenance::Fixed);
    provenance.insert("quad_offset".into(), Provenance::Fixed);
    let bh_source = if singular { Provenance::Fixed } else { Provenance::Measured };
    provenance.insert("b_p".into(), bh_source);
    provenance.insert("h_p".into(), bh_source);
    let mut params = ClosedFormParams {
        p,
        class,
        d: 1,
        quad_offset: Rational::zero(),
        r_p: 0,
        x_coeff,
        a_p: 0,
        ell_p: 0,
        n_p,
        s_p: s,
        w_p: w,
        b_p: b,
        h_p: h,
        provenance,
    };
    if singular {
        let ell = local_data(model, p)?.v_delta as u64;
        params.ell_p = ell;
        params.provenance.insert("ell_p".into(), Provenance::Invariant);
        params.provenance.insert("a_p".into(), Provenance::Fitted);
        if direct.is_empty() {
            return Err(Error::FitFailure("a_P needs direct valuations".into()));
        }
        // R_n(a, l) = R_n(l − a, l), so a_P ≤ l/2 is a normalization.
        let fitted = (1..=ell / 2).find(|&a| {
            params.a_p = a;
            direct.iter().enumerate().all(|(i, v)| predict(&params, i as u64 + 1).map(|x| x == *v).unwrap_or(false))
        });
        match fitted {
            Some(a) => params.a_p = a,
            None => return Err(Error::FitFailure(format!("no a_P in [1, {}] reproduces the valuations", ell / 2))),
        }
    } else {
        params.provenance.insert("a_p".into(), Provenance::Fixed);
    }
    Ok(params)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Mismatch {
    pub n: u64,
    pub predicted: ExtValuation,
    pub actual: ExtValuation,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub p: u64,
    pub class: ReductionClass,
    pub params: ClosedFormParams,
    pub checked_n: u64,
    /// Valuations `n ≤ fit_window` were used to choose parameters.
    pub fit_window: u64,
    pub direct: Vec<ExtValuation>,
    pub mismatches: Vec<Mismatch>,
}

impl VerificationReport {
    pub fn verified(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compare a parameter set against known valuations.
pub fn compare(params: &ClosedFormParams, direct: &[ExtValuation]) -> Result<Vec<Mismatch>> {
    let mut out = Vec::new();
    for (i, actual) in direct.iter().enumerate() {
        let n = i as u64 + 1;
        let predicted = predict(params, n)?;
        if predicted != *actual {
            out.push(Mismatch { n, predicted, actual: *actual });
        }
    }
    Ok(out)
}

/// Direct `v_p(W_n)` for `n ≤ n_max`, parameters from the first half, and a
/// comparison over the full range.
pub fn verify<F: Valued>(
    model: &WeierstrassModel<F>,
    point: &CurvePoint<F>,
    p: u64,
    n_max: usize,
    probe_cap: Option<u64>,
) -> Result<VerificationReport> {
    if n_max < 2 {
        return Err(Error::InvalidArgument("verification needs N >= 2".into()));
    }
    let direct = eds(model, point, n_max)?.valuations(p)?;
    verify_valuations(model, point, p, direct, probe_cap)
}

/// As [`verify`], with the direct valuations supplied by the caller.
pub fn verify_valuations<F: Valued>(
    model: &WeierstrassModel<F>,
    point: &CurvePoint<F>,
    p: u64,
    direct: Vec<ExtValuation>,
    probe_cap: Option<u64>,
) -> Result<VerificationReport> {
    let window = direct.len() / 2;
    let params = derive_params(model, point, p, &direct[..window], probe_cap)?;
    let mismatches = compare(&params, &direct)?;
    Ok(VerificationReport {
        p,
        class: params.class,
        checked_n: direct.len() as u64,
        fit_window: window as u64,
        params,
        direct,
        mismatches,
    })
}

/// For potential good reduction: the fitted `n_P` is allowed by the
/// ramification data (`d' = d / gcd(d, d·v(Δ)/12)`). `None` for other classes.
pub fn check_kernel_index(params: &ClosedFormParams) -> Option<bool> {
    if params.class.reduction != ReductionType::AdditivePotGood || !params.quad_offset.is_integer() {
        return None;
    }
    let quad = params.quad_offset.to_integer();
    let q = u64::try_from(quad).ok()?;
    let d_prime = params.d / params.d.gcd(&q);
    let n = params.n_p;
    Some(match d_prime {
        1 => true,
        2 | 4 | 8 => n == 1 || n == 2,
        3 => n == 1 || n == 3,
        _ => n == 1,
    })
}

/// Direct and predicted `v(Θ([p^k]z))`, `k = 0..=k_max`, for a point `z` in
/// the kernel of reduction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelValuations {
    pub params: SParams,
    pub direct: Vec<ExtValuation>,
    pub predicted: Vec<ExtValuation>,
}

/// Check `v(Θ([p^k]z)) = S_{p^k}(p, b, 1, h, v(Θ(z)), w)` with `(b, h)` from
/// the formal group and `w` from the equality case.
pub fn kernel_multiple_valuations<F: Valued>(
    model: &WeierstrassModel<F>,
    z: &CurvePoint<F>,
    p: u64,
    k_max: u32,
) -> Result<KernelValuations> {
    let mut direct = Vec::new();
    let mut q = z.clone();
    for k in 0..=k_max {
        if k > 0 {
            q = model.scalar_mul(&q, p as i64)?;
        }
        direct.push(model.theta_valuation(&q, p)?);
    }
    let bh = formal_b_h(model, p)?;
    let s = direct[0];
    let base = SParams::new(p, bh.b, 1, bh.h, s, ExtValuation::Finite(0))?;
    let j = base.j()?;
    let w = match s {
        ExtValuation::Finite(sv) if bh.b > 1 && (bh.b as i64).pow(j) * ((bh.b as i64 - 1) * sv + bh.h as i64) == 1 => {
            let (aj, aj1) = (direct.get(j as usize), direct.get(j as usize + 1));
            match (aj, aj1) {
                (_, Some(ExtValuation::Infinite)) => ExtValuation::Infinite,
                (Some(ExtValuation::Finite(a0)), Some(ExtValuation::Finite(a1))) => {
                    ExtValuation::Finite(a1 - bh.b as i64 * a0 - bh.h as i64)
                }
                _ => return Err(Error::InvalidArgument("k_max too small to observe w".into())),
            }
        }
        _ => ExtValuation::Finite(0),
    };
    let params = SParams { w, ..base };
    let predicted = (0..=k_max).map(|k| s_eval(&params, p.pow(k))).collect::<Result<Vec<_>>>()?;
    Ok(KernelValuations { params, direct, predicted })
}
