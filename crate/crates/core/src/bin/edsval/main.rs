//! `edsval`: sequence terms, valuation checks, the troublemaker table and
//! height bounds from the command line.
//!
//! Exit codes: 0 ok, 1 verification mismatch, 2 input error, 3 resource or
//! precision limit.

mod output;

use std::collections::BTreeSet;
use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use edsval::curves::{parse_curve_json, CurvePoint, PointInput, WeierstrassModel, MAX_ENUMERATION_PRIME};
use edsval::divpoly::eds;
use edsval::heights::{self, INTEGRAL_MULTIPLE_COEFFICIENT};
use edsval::numbers::{format_factored, format_plain, trial_factor, Rational};
use edsval::reduction::{verify, VerificationReport};
use edsval::troublemaker::{table1, table1_csv, table1_diff};
use edsval::{Error, ErrorClass};

use output::{fmt_float, fmt_val, round_floats};

/// Trial-division bound for `--factor` and automatic prime selection.
const FACTOR_BOUND: u64 = 1_000_000;

#[derive(Parser)]
#[command(name = "edsval", version, about = "Elliptic divisibility sequences and their valuations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print W_1..W_N, with valuations at --primes.
    Eds(Common),
    /// Compare closed-form valuations with direct ones at each prime.
    Verify(Common),
    /// Print the R_n(a, l) table.
    Table1(Common),
    /// Point and curve heights with the integral-point bounds.
    Heights(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args)]
struct Common {
    /// Curve as inline JSON or a path to a JSON file.
    #[arg(long)]
    curve: Option<String>,
    /// Point as JSON, e.g. '["24","-4"]'; overrides the curve's "P".
    #[arg(long)]
    point: Option<String>,
    /// Comma-separated primes; chosen automatically for `verify` if absent.
    #[arg(long, value_delimiter = ',')]
    primes: Vec<u64>,
    /// Number of terms N.
    #[arg(long = "n")]
    n: Option<usize>,
    /// Run `verify` in Q_p with this many digits instead of over Q.
    #[arg(long)]
    precision: Option<u32>,
    /// Canonical-height tolerance.
    #[arg(long, default_value_t = 1e-3)]
    tolerance: f64,
    /// Maximum doublings for the canonical height.
    #[arg(long, default_value_t = heights::DEFAULT_DEPTH)]
    depth: u32,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Diff the table against the stored reference values.
    #[arg(long)]
    check: bool,
    /// Print sequence terms factored by trial division.
    #[arg(long)]
    factor: bool,
}

/// Process exit status.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Status {
    Ok = 0,
    Mismatch = 1,
    Input = 2,
    Resource = 3,
}

impl From<&Error> for Status {
    fn from(e: &Error) -> Self {
        match e.class() {
            ErrorClass::Input => Status::Input,
            ErrorClass::Resource => Status::Resource,
            ErrorClass::Verification => Status::Mismatch,
        }
    }
}

type CmdResult = Result<Status, Error>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Eds(c) => cmd_eds(c),
        Command::Verify(c) => cmd_verify(c),
        Command::Table1(c) => cmd_table1(c),
        Command::Heights(c) => cmd_heights(c),
    };
    let status = result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        Status::from(&e)
    });
    ExitCode::from(status as u8)
}

fn load_input(c: &Common) -> Result<(WeierstrassModel<Rational>, CurvePoint<Rational>), Error> {
    let arg = c.curve.as_deref().ok_or_else(|| Error::Input("--curve is required".into()))?;
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| Error::Input(format!("{arg}: {e}")))?
    };
    let (model, point) = parse_curve_json(&text)?;
    let point = match &c.point {
        Some(p) => {
            let pi: PointInput = serde_json::from_str(p).map_err(|e| Error::Input(format!("--point: {e}")))?;
            let p = pi.parse()?;
            if !model.contains(&p) {
                return Err(Error::NotOnCurve);
            }
            p
        }
        None => point.ok_or_else(|| Error::Input("no point given (\"P\" or --point)".into()))?,
    };
    if point.is_identity() {
        return Err(Error::Input("P must be an affine point".into()));
    }
    Ok((model, point))
}

fn require_n(c: &Common, default: usize) -> Result<usize, Error> {
    let n = c.n.unwrap_or(default);
    if n == 0 {
        return Err(Error::Input("--n must be at least 1".into()));
    }
    Ok(n)
}

fn emit_json(v: &Value) {
    let v = round_floats(v.clone());
    println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
}

fn cmd_eds(c: &Common) -> CmdResult {
    let (model, point) = load_input(c)?;
    let n = require_n(c, 10)?;
    let seq = eds(&model, &point, n)?;
    let mut vals = Vec::new();
    for &p in &c.primes {
        vals.push((p, seq.valuations(p)?));
    }
    let show = |w: &Rational| if c.factor { format_factored(w, FACTOR_BOUND) } else { format_plain(w) };
    match c.format {
        Format::Json => {
            let valuations: serde_json::Map<String, Value> =
                vals.iter().map(|(p, v)| (p.to_string(), json!(v))).collect();
            emit_json(&json!({
                "terms": seq.terms().iter().map(show).collect::<Vec<_>>(),
                "valuations": valuations,
            }));
        }
        Format::Csv => {
            let mut header = String::from("n,W_n");
            for (p, _) in &vals {
                header.push_str(&format!(",v_{p}"));
            }
            println!("{header}");
            for (i, w) in seq.terms().iter().enumerate() {
                let mut line = format!("{},{}", i + 1, show(w));
                for (_, v) in &vals {
                    line.push_str(&format!(",{}", fmt_val(v[i])));
                }
                println!("{line}");
            }
        }
        Format::Text => {
            for (i, w) in seq.terms().iter().enumerate() {
                let mut line = show(w);
                for (_, v) in &vals {
                    line.push_str(&format!("\t{}", fmt_val(v[i])));
                }
                println!("{line}");
            }
        }
    }
    Ok(Status::Ok)
}

/// Primes dividing the numerator or denominator of `Δ` or one of
/// `x([n]P)`'s denominators for `n ≤ 10`, found by trial division.
fn auto_primes(model: &WeierstrassModel<Rational>, point: &CurvePoint<Rational>) -> Result<Vec<u64>, Error> {
    let mut found = BTreeSet::new();
    let delta = model.discriminant();
    for part in [delta.numer().magnitude(), delta.denom().magnitude()] {
        found.extend(trial_factor(part, FACTOR_BOUND).0.into_iter().map(|(p, _)| p));
    }
    let mut q = point.clone();
    for _ in 1..=10 {
        if let Some(x) = q.x() {
            found.extend(trial_factor(x.denom().magnitude(), FACTOR_BOUND).0.into_iter().map(|(p, _)| p));
        }
        q = model.add(&q, point)?;
    }
    let (keep, skip): (Vec<u64>, Vec<u64>) = found.into_iter().partition(|&p| p <= MAX_ENUMERATION_PRIME);
    if !skip.is_empty() {
        eprintln!("note: skipping primes above {MAX_ENUMERATION_PRIME}: {skip:?}");
    }
    Ok(keep)
}

fn verify_one(
    model: &WeierstrassModel<Rational>,
    point: &CurvePoint<Rational>,
    p: u64,
    n: usize,
    precision: Option<u32>,
) -> Result<VerificationReport, Error> {
    match precision {
        None => verify(model, point, p, n, None),
        Some(digits) => verify(&model.to_padic(p, digits)?, &point.to_padic(p, digits)?, p, n, None),
    }
}

fn cmd_verify(c: &Common) -> CmdResult {
    let (model, point) = load_input(c)?;
    let n = require_n(c, 30)?;
    if n < 2 {
        return Err(Error::Input("verify needs --n >= 2".into()));
    }
    if let Some(d) = c.precision {
        if d < 32 {
            return Err(Error::Input("--precision must be at least 32 digits".into()));
        }
    }
    let primes = if c.primes.is_empty() { auto_primes(&model, &point)? } else { c.primes.clone() };
    let mut reports = Vec::new();
    for &p in &primes {
        reports.push(verify_one(&model, &point, p, n, c.precision)?);
    }
    match c.format {
        Format::Json => emit_json(&json!(reports)),
        Format::Csv => {
            println!("p,n,direct,predicted");
            for r in &reports {
                for (i, v) in r.direct.iter().enumerate() {
                    let n = i as u64 + 1;
                    let pred = r.mismatches.iter().find(|m| m.n == n).map_or(*v, |m| m.predicted);
                    println!("{},{},{},{}", r.p, n, fmt_val(*v), fmt_val(pred));
                }
            }
        }
        Format::Text => {
            for r in &reports {
                let params = &r.params;
                println!(
                    "p={} {:?}/{:?} d={} n_P={} s={} w={} b={} h={} a={} l={} checked={} fit<={} {}",
                    r.p,
                    r.class.reduction,
                    r.class.point,
                    params.d,
                    params.n_p,
                    params.s_p,
                    params.w_p,
                    params.b_p,
                    params.h_p,
                    params.a_p,
                    params.ell_p,
                    r.checked_n,
                    r.fit_window,
                    if r.verified() { "OK" } else { "MISMATCH" }
                );
                for m in &r.mismatches {
                    println!("  n={} predicted={} actual={}", m.n, m.predicted, m.actual);
                }
            }
        }
    }
    Ok(if reports.iter().all(|r| r.verified()) { Status::Ok } else { Status::Mismatch })
}

fn cmd_table1(c: &Common) -> CmdResult {
    let rows = table1();
    match c.format {
        Format::Json => emit_json(&json!(rows
            .iter()
            .map(|r| json!({"a": r.a, "ell": r.ell, "values": r.values}))
            .collect::<Vec<_>>())),
        Format::Csv | Format::Text => print!("{}", table1_csv(&rows)),
    }
    if !c.check {
        return Ok(Status::Ok);
    }
    let diff = table1_diff(&rows);
    for (a, ell, n, got, want) in &diff {
        eprintln!("R_{n}({a},{ell}) = {got}, reference {want}");
    }
    Ok(if diff.is_empty() { Status::Ok } else { Status::Mismatch })
}

fn cmd_heights(c: &Common) -> CmdResult {
    let (model, point) = load_input(c)?;
    let n = require_n(c, 20)?;
    let mut notices: Vec<String> = Vec::new();
    let h_naive = heights::naive_height(point.x().expect("affine"));
    let h_hat = heights::canonical_height(&model, &point, c.tolerance, c.depth)?;
    let h0 = heights::h0(&model);
    let curve = match heights::curve_heights(&model) {
        Ok(h) => Some(h),
        Err(e) => {
            notices.push(format!("hI and hLH skipped: {e}"));
            None
        }
    };
    let torsion = heights::is_torsion(&model, &point)?;
    let mut ok = true;
    let bounds = heights::check_denominator_bounds(&model, &point, n, None)?;
    if let Some(why) = &bounds.hypothesis {
        notices.push(format!("denominator bounds not checked: {why}"));
    }
    ok &= bounds.holds();
    let multiples = if curve.is_some() && !torsion && bounds.hypothesis.is_none() {
        let r = heights::integral_multiples(&model, &point, n, INTEGRAL_MULTIPLE_COEFFICIENT, c.tolerance)?;
        ok &= r.holds();
        Some(r)
    } else {
        notices.push("integral-multiple bound not checked: needs a short integral model and an integral point of infinite order".into());
        None
    };
    if let Some(h) = &curve {
        if !h.comparisons_hold() {
            notices.push("h0/hI comparison failed".into());
            ok = false;
        }
    }
    match c.format {
        Format::Json => emit_json(&json!({
            "h_naive": h_naive,
            "h_hat": h_hat,
            "h0": h0,
            "h_i": curve.map(|h| h.h_i),
            "h_lh": curve.map(|h| h.h_lh),
            "denominator_bounds": bounds,
            "integral_multiples": multiples,
            "notices": notices,
        })),
        Format::Csv => {
            println!("n,Dn,log_Wn,bound_ok");
            for r in &bounds.rows {
                println!("{},{},{},{}", r.n, r.dn, fmt_float(r.log_wn), r.bound_ok);
            }
        }
        Format::Text => {
            println!("h_naive {}", fmt_float(h_naive));
            println!("h_hat {}", fmt_float(h_hat));
            println!("h0 {}", fmt_float(h0));
            if let Some(h) = &curve {
                println!("hI {}", fmt_float(h.h_i));
                println!("hLH {}", fmt_float(h.h_lh));
            }
            for r in &bounds.rows {
                println!("n={} Dn={} log|Wn|={} bound_ok={}", r.n, r.dn, fmt_float(r.log_wn), r.bound_ok);
            }
            if let Some(m) = &multiples {
                println!("integral multiples {:?}", m.multiples);
                for chk in &m.checks {
                    println!("n={} bound={} bound_ok={}", chk.n, fmt_float(chk.bound), chk.bound_ok);
                }
            }
        }
    }
    for note in &notices {
        eprintln!("note: {note}");
    }
    Ok(if ok { Status::Ok } else { Status::Mismatch })
}
