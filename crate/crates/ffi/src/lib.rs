//! C ABI over `edsval`.
//!
//! Curves live behind an opaque `EdsvCurve` handle. Every fallible call
//! returns an `EdsvStatus`; on failure `edsv_last_error` describes it.
//! Strings handed out by the library are NUL-terminated JSON and must be
//! released with `edsv_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use edsval::curves::{parse_curve_json, CurvePoint, WeierstrassModel};
use edsval::divpoly::eds;
use edsval::heights::canonical_height;
use edsval::numbers::{format_plain, Rational};
use edsval::reduction::verify;
use edsval::troublemaker::troublemaker;
use edsval::{Error, ErrorClass};
use serde_json::json;

/// Outcome of a call. The first four values match the CLI exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdsvStatus {
    Ok = 0,
    /// A closed form disagreed with direct computation.
    Mismatch = 1,
    InvalidInput = 2,
    /// Precision, size or convergence limit reached.
    Resource = 3,
    NullPointer = 4,
    /// A Rust panic was caught at the boundary.
    Panic = 5,
}

/// A curve with an optional point.
pub struct EdsvCurve {
    model: WeierstrassModel<Rational>,
    point: Option<CurvePoint<Rational>>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("NUL bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Fail(EdsvStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e.class() {
            ErrorClass::Input => EdsvStatus::InvalidInput,
            ErrorClass::Resource => EdsvStatus::Resource,
            ErrorClass::Verification => EdsvStatus::Mismatch,
        };
        Fail(status, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(EdsvStatus::NullPointer, format!("{what} is null"))
}

/// Run `f` at the boundary: catch panics, record errors.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> EdsvStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EdsvStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            EdsvStatus::Panic
        }
    }
}

unsafe fn curve_ref<'a>(curve: *const EdsvCurve) -> Result<&'a EdsvCurve, Fail> {
    curve.as_ref().ok_or_else(|| null("curve"))
}

fn point_of(curve: &EdsvCurve) -> Result<&CurvePoint<Rational>, Fail> {
    curve
        .point
        .as_ref()
        .ok_or_else(|| Fail(EdsvStatus::InvalidInput, "curve has no point".into()))
}

unsafe fn write_json(out: *mut *mut c_char, value: serde_json::Value) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    let s = CString::new(value.to_string()).expect("JSON has no NUL bytes");
    *out = s.into_raw();
    Ok(())
}

/// Parse `{"a": [a1, a2, a3, a4, a6], "P": [x, y]}` into a new handle.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn edsv_curve_from_json(json: *const c_char, out: *mut *mut EdsvCurve) -> EdsvStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| Fail(EdsvStatus::InvalidInput, "json is not UTF-8".into()))?;
        let (model, point) = parse_curve_json(text)?;
        *out = Box::into_raw(Box::new(EdsvCurve { model, point }));
        Ok(())
    })
}

/// Release a handle. Null is ignored.
///
/// # Safety
/// `curve` must come from `edsv_curve_from_json` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn edsv_curve_free(curve: *mut EdsvCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Terms `W_1..W_n` as decimal strings, plus `v_p(W_k)` when `p > 0`:
/// `{"terms": [...], "valuations": [...] | null}` (infinite valuations are null).
///
/// # Safety
/// `curve` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn edsv_eds(curve: *const EdsvCurve, n: u32, p: u64, out: *mut *mut c_char) -> EdsvStatus {
    guard(|| {
        let c = curve_ref(curve)?;
        let seq = eds(&c.model, point_of(c)?, n as usize)?;
        let valuations = if p > 0 { Some(seq.valuations(p)?) } else { None };
        let terms: Vec<String> = seq.terms().iter().map(format_plain).collect();
        write_json(out, json!({ "terms": terms, "valuations": valuations }))
    })
}

/// Derive the closed form at `p` and compare it with `v_p(W_k)`, `k ≤ n`.
/// Writes the full report; returns `Mismatch` if any term disagrees.
///
/// # Safety
/// `curve` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn edsv_verify(curve: *const EdsvCurve, p: u64, n: u32, out: *mut *mut c_char) -> EdsvStatus {
    guard(|| {
        let c = curve_ref(curve)?;
        let report = verify(&c.model, point_of(c)?, p, n as usize, None)?;
        let ok = report.verified();
        let value = serde_json::to_value(&report).expect("report serializes");
        write_json(out, value)?;
        if ok {
            Ok(())
        } else {
            Err(Fail(EdsvStatus::Mismatch, format!("{} mismatches at p = {p}", report.mismatches.len())))
        }
    })
}

/// Canonical height of the curve's point by repeated doubling.
///
/// # Safety
/// `curve` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn edsv_canonical_height(
    curve: *const EdsvCurve,
    tolerance: f64,
    depth: u32,
    out: *mut f64,
) -> EdsvStatus {
    guard(|| {
        let c = curve_ref(curve)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = canonical_height(&c.model, point_of(c)?, tolerance, depth)?;
        Ok(())
    })
}

/// `R_n(a, l)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn edsv_troublemaker(n: i64, a: i64, ell: i64, out: *mut i64) -> EdsvStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = troublemaker(n, a, ell)?;
        Ok(())
    })
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn edsv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Release a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn edsv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn edsv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
