//! Naive, canonical and curve heights, denominator sequences, the height
//! inequalities for integral points, and the growth constant of `v(W_n)`.

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::curves::{CurvePoint, WeierstrassModel};
use crate::divpoly::eds;
use crate::error::{Error, Result};
use crate::formal::SParams;
use crate::numbers::{format_rational, ln_abs, rat, ExtValuation, Rational};
use crate::reduction::ClosedFormParams;

/// Doublings used by [`canonical_height`] unless told otherwise.
pub const DEFAULT_DEPTH: u32 = 8;

/// Torsion is detected by `Ψ_n(P) = 0` for `n` up to this bound (Mazur).
pub const TORSION_PROBE: usize = 12;

/// `h(q) = log max(|num|, |den|)`.
pub fn naive_height(q: &Rational) -> f64 {
    let (n, d) = (q.numer().abs(), q.denom().clone());
    ln_abs(if n > d { &n } else { &d }).max(0.0)
}

/// True when `Ψ_n(P) = 0` for some `n ≤ 12`.
pub fn is_torsion(model: &WeierstrassModel<Rational>, point: &CurvePoint<Rational>) -> Result<bool> {
    if point.is_identity() {
        return Ok(true);
    }
    let seq = eds(model, point, TORSION_PROBE)?;
    Ok(seq.terms().iter().any(|w| w.is_zero()))
}

/// `ĥ(P) ≈ h(x([2^k]P)) / (2·4^k)`, stopping once two successive estimates
/// differ by less than `tolerance`. Torsion points return exactly 0.
pub fn canonical_height(
    model: &WeierstrassModel<Rational>,
    point: &CurvePoint<Rational>,
    tolerance: f64,
    depth: u32,
) -> Result<f64> {
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    if is_torsion(model, point)? {
        return Ok(0.0);
    }
    let x = point.x().expect("non-torsion point is affine");
    let mut last = naive_height(x) / 2.0;
    let mut q = point.clone();
    let mut scale = 2.0;
    for _ in 0..depth {
        q = model.double(&q)?;
        scale *= 4.0;
        let Some(x) = q.x() else {
            // unreachable after the Ψ probe, kept for safety
            return Ok(0.0);
        };
        let est = naive_height(x) / scale;
        if (est - last).abs() < tolerance {
            return Ok(est);
        }
        last = est;
    }
    Err(Error::ConvergenceFailure { last })
}

/// Heights of a model in short form `y² = x³ + Ax + B`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurveHeights {
    /// `max{h(j), log|Δ|, 1}`
    pub h0: f64,
    /// `max{h(j), log max{4|A|, 4|B|}}`
    pub h_i: f64,
    /// `log max{|A|, |B|}`
    pub h_lh: f64,
}

impl CurveHeights {
    /// `h0 ≤ 18·hI` and `hI ≤ 4·h0`.
    pub fn comparisons_hold(&self) -> bool {
        self.h0 <= 18.0 * self.h_i && self.h_i <= 4.0 * self.h0
    }
}

/// `max{h(j), h(Δ), 1}` for any model; `h(Δ) = log|Δ|` when `Δ` is an integer.
pub fn h0(model: &WeierstrassModel<Rational>) -> f64 {
    let inv = model.invariants();
    naive_height(&inv.j).max(naive_height(&inv.delta)).max(1.0)
}

fn integer(q: &Rational) -> Option<BigInt> {
    q.is_integer().then(|| q.to_integer())
}

/// The three curve heights. Needs `a1 = a2 = a3 = 0` and integral `A, B`.
pub fn curve_heights(model: &WeierstrassModel<Rational>) -> Result<CurveHeights> {
    if !model.is_short() {
        return Err(Error::Hypothesis("curve heights need a short Weierstrass model".into()));
    }
    let (Some(a), Some(b)) = (integer(model.a4()), integer(model.a6())) else {
        return Err(Error::Hypothesis("curve heights need integral A and B".into()));
    };
    let (a, b) = (a.abs(), b.abs());
    let big = if a > b { a } else { b };
    let hj = naive_height(&model.invariants().j);
    Ok(CurveHeights {
        h0: h0(model),
        h_i: hj.max(ln_abs(&(&big * 4))),
        h_lh: ln_abs(&big),
    })
}

/// Point and curve heights together.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HeightValues {
    pub h_naive: f64,
    pub h_hat: f64,
    #[serde(flatten)]
    pub curve: CurveHeights,
}

pub fn height_values(
    model: &WeierstrassModel<Rational>,
    point: &CurvePoint<Rational>,
    tolerance: f64,
    depth: u32,
) -> Result<HeightValues> {
    let x = point.x().ok_or_else(|| Error::InvalidArgument("the point must be affine".into()))?;
    Ok(HeightValues {
        h_naive: naive_height(x),
        h_hat: canonical_height(model, point, tolerance, depth)?,
        curve: curve_heights(model)?,
    })
}

fn ser_biguints<S: Serializer>(v: &[BigUint], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|d| d.to_string()))
}

/// `D_1, …, D_N` where `x([n]P) = A_n / D_n²` in lowest terms. A torsion
/// multiple gets `D_n = 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DenominatorSequence {
    #[serde(serialize_with = "ser_biguints")]
    pub terms: Vec<BigUint>,
}

impl DenominatorSequence {
    pub fn get(&self, n: usize) -> Option<&BigUint> {
        n.checked_sub(1).and_then(|i| self.terms.get(i))
    }

    pub fn is_torsion_multiple(&self, n: usize) -> bool {
        self.get(n).is_some_and(|d| d.is_zero())
    }

    pub fn has_torsion(&self) -> bool {
        self.terms.iter().any(|d| d.is_zero())
    }
}

fn multiples(
    model: &WeierstrassModel<Rational>,
    point: &CurvePoint<Rational>,
    n_max: usize,
) -> Result<Vec<CurvePoint<Rational>>> {
    let mut out = Vec::with_capacity(n_max);
    let mut q = point.clone();
    for n in 1..=n_max {
        if n > 1 {
            q = model.add(&q, point)?;
        }
        out.push(q.clone());
    }
    Ok(out)
}

pub fn denominators(
    model: &WeierstrassModel<Rational>,
    point: &CurvePoint<Rational>,
    n_max: usize,
) -> Result<DenominatorSequence> {
    let mut terms = Vec::with_capacity(n_max);
    for (i, q) in multiples(model, point, n_max)?.into_iter().enumerate() {
        let d = match q.x() {
            None => BigUint::zero(),
            Some(x) => {
                let den = x.denom().magnitude().clone();
                let root = den.sqrt();
                if &root * &root != den {
                    return Err(Error::InternalInconsistency(format!(
                        "denominator of x([{}]P) is not a square",
                        i + 1
                    )));
                }
                root
            }
        };
        terms.push(d);
    }
    Ok(DenominatorSequence { terms })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DenominatorRow {
    pub n: u64,
    #[serde(rename = "Dn")]
    pub dn: String,
    #[serde(rename = "log_Wn")]
    pub log_wn: f64,
    pub bound_ok: bool,
}

/// `log D_n ≤ log|W_n| ≤ log D_n + (n²/8)·log|Δ|` for each `n`, compared
/// exactly as `D_n ≤ |W_n|` and `|W_n|⁸ ≤ D_n⁸·|Δ|^{n²}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DenominatorBoundReport {
    /// Set when the inputs do not meet the hypotheses; no rows then.
    pub hypothesis: Option<String>,
    pub rows: Vec<DenominatorRow>,
}

impl DenominatorBoundReport {
    pub fn holds(&self) -> bool {
        self.rows.iter().all(|r| r.bound_ok)
    }

    pub fn violations(&self) -> Vec<u64> {
        self.rows.iter().filter(|r| !r.bound_ok).map(|r| r.n).collect()
    }

    fn refused(why: &str) -> Self {
        DenominatorBoundReport { hypothesis: Some(why.into()), rows: Vec::new() }
    }
}

fn integral_point(point: &CurvePoint<Rational>) -> bool {
    match point {
        CurvePoint::Affine { x, y } => x.is_integer() && y.is_integer(),
        CurvePoint::Identity => false,
    }
}

/// Check the denominator bounds for `n ≤ n_max`. `delta_override` replaces
/// `|Δ|` in the upper bound (for mutation testing).
pub fn check_denominator_bounds(
    model: &WeierstrassModel<Rational>,
    point: &CurvePoint<Rational>,
    n_max: usize,
    delta_override: Option<BigInt>,
) -> Result<DenominatorBoundReport> {
    if !model.is_integral() {
        return Ok(DenominatorBoundReport::refused("model is not integral"));
    }
    if !integral_point(point) {
        return Ok(DenominatorBoundReport::refused("P is not integral"));
    }
    if is_torsion(model, point)? {
        return Ok(DenominatorBoundReport::refused("P has finite order"));
    }
    let denoms = denominators(model, point, n_max)?;
    if denoms.has_torsion() {
        return Ok(DenominatorBoundReport::refused("P has finite order"));
    }
    let delta = delta_override.unwrap_or_else(|| model.discriminant().to_integer()).magnitude().clone();
    let seq = eds(model, point, n_max)?;
    let mut rows = Vec::with_capacity(n_max);
    for (i, (w, d)) in seq.terms().iter().zip(&denoms.terms).enumerate() {
        let n = i as u64 + 1;
        let w = integer(w)
            .ok_or_else(|| Error::InternalInconsistency(format!("W_{n} is not an integer")))?
            .magnitude()
            .clone();
        let lower = d <= &w;
        let exp = u32::try_from(n * n).map_err(|_| Error::ResourceLimit("n too large".into()))?;
        let upper = w.pow(8) <= d.pow(8) * delta.pow(exp);
        rows.push(DenominatorRow {
            n,
            dn: d.to_string(),
            log_wn: ln_abs(&BigInt::from(w)),
            bound_ok: lower && upper,
        });
    }
    Ok(DenominatorBoundReport { hypothesis: None, rows })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultipleBound {
    pub n: u64,
    /// `log n + coefficient·hI`
    pub bound: f64,
    pub bound_ok: bool,
}

/// Integral multiples `[n]P`, `n ≤ N`, and `ĥ(P) ≤ log n + c·hI(E)` for
/// each of them with `n ≥ 2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegralMultiplesReport {
    pub multiples: Vec<u64>,
    pub h_hat: f64,
    pub h_i: f64,
    pub coefficient: f64,
    pub checks: Vec<MultipleBound>,
}

impl IntegralMultiplesReport {
    pub fn holds(&self) -> bool {
        self.checks.iter().all(|c| c.bound_ok)
    }
}

/// The coefficient of `hI` in the integral-multiple bound.
pub const INTEGRAL_MULTIPLE_COEFFICIENT: f64 = 5.5;

pub fn integral_multiples(
    model: &WeierstrassModel<Rational>,
    point: &CurvePoint<Rational>,
    n_max: usize,
    coefficient: f64,
    tolerance: f64,
) -> Result<IntegralMultiplesReport> {
    let heights = curve_heights(model)?;
    if !integral_point(point) {
        return Err(Error::Hypothesis("P is not integral".into()));
    }
    if is_torsion(model, point)? {
        return Err(Error::Hypothesis("P has finite order".into()));
    }
    let h_hat = canonical_height(model, point, tolerance, DEFAULT_DEPTH)?;
    let mut found = Vec::new();
    let mut checks = Vec::new();
    for (i, q) in multiples(model, point, n_max)?.iter().enumerate() {
        if !integral_point(q) {
            continue;
        }
        let n = i as u64 + 1;
        found.push(n);
        if n >= 2 {
            let bound = (n as f64).ln() + coefficient * heights.h_i;
            checks.push(MultipleBound { n, bound, bound_ok: h_hat <= bound + tolerance });
        }
    }
    Ok(IntegralMultiplesReport { multiples: found, h_hat, h_i: heights.h_i, coefficient, checks })
}

fn ser_rat<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(q))
}

/// Quadratic growth of a valuation sequence against its closed form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthReport {
    /// `Σ n²v_n / Σ n⁴` over finite `v_n`, `n ∈ [N/2, N]`.
    #[serde(serialize_with = "ser_rat")]
    pub estimate: Rational,
    /// Quadratic coefficient of the closed form.
    #[serde(serialize_with = "ser_rat")]
    pub predicted: Rational,
    /// `(A, B)` with `|v_n − predicted·n²| ≤ A + B·log n`.
    pub log_bound: (f64, f64),
    /// `n` where that bound fails.
    pub violations: Vec<u64>,
}

impl GrowthReport {
    /// `|estimate − predicted| ≤ 2(A + B·log N)/N²`.
    pub fn agrees(&self, n_max: usize) -> bool {
        let n = n_max as f64;
        let gap = (self.estimate.clone() - self.predicted.clone()).abs();
        let gap = gap.to_f64().unwrap_or(f64::INFINITY);
        gap <= 2.0 * (self.log_bound.0 + self.log_bound.1 * n.ln()) / (n * n)
    }
}

/// Leading coefficient and logarithmic error of `v(W_n)`, `n ≤ N`.
pub fn growth_constant(valuations: &[ExtValuation], params: &ClosedFormParams) -> Result<GrowthReport> {
    let n_max = valuations.len();
    if n_max < 2 {
        return Err(Error::InvalidArgument("growth constant needs at least two valuations".into()));
    }
    let d = rat(params.d as i64);
    let mut coeff = params.quad_offset.clone() + params.x_coeff.clone();
    let mut a_const = params.quad_offset.abs().to_f64().unwrap_or(0.0);
    if params.ell_p > 0 {
        let (a, l) = (params.a_p as i64, params.ell_p as i64);
        coeff += Rational::new((a * (l - a)).into(), (2 * l).into());
        a_const += l as f64 / 8.0;
    }
    let predicted = coeff / d.clone() + rat(params.r_p);
    let (s_a, s_b) = SParams::log_bound(&params.s_params()?)?.unwrap_or((0.0, 0.0));
    let df = params.d as f64;
    let log_bound = ((a_const + s_a) / df + params.r_p.unsigned_abs() as f64, s_b / df);

    let (mut num, mut den) = (Rational::zero(), Rational::zero());
    for n in n_max / 2..=n_max {
        if let Some(v) = valuations[n - 1].finite() {
            let n2 = rat(n as i64) * rat(n as i64);
            num += &n2 * rat(v);
            den += &n2 * &n2;
        }
    }
    if den.is_zero() {
        return Err(Error::InvalidArgument("no finite valuations in the fit range".into()));
    }
    let estimate = num / den;

    let mut violations = Vec::new();
    for (i, v) in valuations.iter().enumerate() {
        let n = i as u64 + 1;
        if let Some(v) = v.finite() {
            let dev = (rat(v) - &predicted * rat((n * n) as i64)).abs().to_f64().unwrap_or(f64::INFINITY);
            if dev > log_bound.0 + log_bound.1 * (n as f64).ln() + 1e-9 {
                violations.push(n);
            }
        }
    }
    Ok(GrowthReport { estimate, predicted, log_bound, violations })
}

/// `n²·ĥ(P)` against `ĥ([n]P)` for `n ≤ n_max`; returns the worst
/// `|ĥ([n]P) − n²ĥ(P)| − (n²+1)·tolerance`, non-positive when quadratic.
pub fn quadraticity_gap(
    model: &WeierstrassModel<Rational>,
    point: &CurvePoint<Rational>,
    n_max: usize,
    tolerance: f64,
) -> Result<f64> {
    let h1 = canonical_height(model, point, tolerance, DEFAULT_DEPTH)?;
    let mut worst = f64::NEG_INFINITY;
    for (i, q) in multiples(model, point, n_max)?.iter().enumerate() {
        let n = (i + 1) as f64;
        let hn = if q.is_identity() { 0.0 } else { canonical_height(model, q, tolerance, DEFAULT_DEPTH)? };
        worst = worst.max((hn - n * n * h1).abs() - (n * n + 1.0) * tolerance);
    }
    Ok(worst)
}
