//! The C entry points, called from Rust, and a C program linked against
//! the static library through the generated header.

use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use edsval_ffi::*;

const EX1: &str = r#"{"a":["1","1","0","-1652","25168"],"P":["24","-4"]}"#;

fn curve(json: &str) -> (EdsvStatus, *mut EdsvCurve) {
    let c = CString::new(json).unwrap();
    let mut out = ptr::null_mut();
    let st = unsafe { edsv_curve_from_json(c.as_ptr(), &mut out) };
    (st, out)
}

fn take_string(s: *mut std::ffi::c_char) -> serde_json::Value {
    let text = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { edsv_string_free(s) };
    serde_json::from_str(&text).unwrap()
}

fn last_error() -> String {
    let p = edsv_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn eds_and_verify_round_trip() {
    let (st, c) = curve(EX1);
    assert_eq!(st, EdsvStatus::Ok);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { edsv_eds(c, 6, 2, &mut out) }, EdsvStatus::Ok);
    let v = take_string(out);
    assert_eq!(v["terms"][1], "16");
    assert_eq!(v["valuations"][5], 37);
    assert_eq!(unsafe { edsv_verify(c, 7, 54, &mut out) }, EdsvStatus::Ok);
    assert_eq!(take_string(out)["mismatches"].as_array().unwrap().len(), 0);
    let mut h = 0.0;
    assert_eq!(unsafe { edsv_canonical_height(c, 1e-3, 8, &mut h) }, EdsvStatus::Ok);
    assert!((h - 0.0957).abs() < 1e-3);
    unsafe { edsv_curve_free(c) };
}

#[test]
fn errors_map_to_status_codes() {
    let (st, c) = curve(r#"{"a":["0","0","0","0","0"]}"#);
    assert_eq!((st, c.is_null()), (EdsvStatus::InvalidInput, true));
    assert!(last_error().contains("singular"));
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { edsv_eds(ptr::null(), 3, 0, &mut out) }, EdsvStatus::NullPointer);
    assert_eq!(unsafe { edsv_curve_from_json(ptr::null(), &mut ptr::null_mut()) }, EdsvStatus::NullPointer);
    let (_, c) = curve(EX1);
    let mut h = 0.0;
    assert_eq!(unsafe { edsv_canonical_height(c, 1e-12, 2, &mut h) }, EdsvStatus::Resource);
    let (_, bare) = curve(r#"{"a":["1","1","0","-1652","25168"]}"#);
    assert_eq!(unsafe { edsv_eds(bare, 3, 0, &mut out) }, EdsvStatus::InvalidInput);
    let mut r = 0;
    assert_eq!(unsafe { edsv_troublemaker(6, 1, 3, &mut r) }, EdsvStatus::Ok);
    assert_eq!(r, 12);
    assert!(edsv_last_error().is_null());
    unsafe {
        edsv_curve_free(c);
        edsv_curve_free(bare);
        edsv_curve_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/edsval.h")).unwrap();
    for name in [
        "edsv_curve_from_json",
        "edsv_curve_free",
        "edsv_eds",
        "edsv_verify",
        "edsv_canonical_height",
        "edsv_troublemaker",
        "edsv_last_error",
        "edsv_string_free",
        "edsv_version",
        "EDSV_STATUS_RESOURCE = 3",
    ] {
        assert!(header.contains(name), "{name}");
    }
}

#[test]
fn c_program_links_and_runs() {
    // target/<profile>/deps/abi-<hash> -> target/<profile>
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libedsval_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no static library or C compiler");
        return;
    }
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("edsval_smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok 0.1.0"));
}
