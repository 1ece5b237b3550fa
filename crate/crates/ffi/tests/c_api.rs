use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use rtaylor_ffi::*;

fn rat(s: &str) -> *mut RtRat {
    let c = CString::new(s).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { rt_rat_parse(c.as_ptr(), &mut out) }, RtStatus::Ok);
    out
}

fn text(r: *const RtRat) -> String {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { rt_rat_to_string(r, &mut s) }, RtStatus::Ok);
    let v = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { rt_string_free(s) };
    v
}

fn last_error() -> String {
    let p = rt_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn rational_round_trip() {
    let r = rat("6/4");
    assert_eq!(text(r), "3/2");
    assert_eq!(unsafe { rt_rat_to_f64(r) }, 1.5);
    unsafe { rt_rat_free(r) };
}

#[test]
fn decimals_are_rejected() {
    let c = CString::new("0.5").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { rt_rat_parse(c.as_ptr(), &mut out) }, RtStatus::Parse);
    assert!(out.is_null());
    assert!(!last_error().is_empty());
}

#[test]
fn null_arguments() {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { rt_rat_parse(ptr::null(), &mut out) }, RtStatus::NullPointer);
    assert_eq!(unsafe { rt_floor_to_grid(ptr::null(), 3, &mut out) }, RtStatus::NullPointer);
    assert_eq!(unsafe { rt_run_certified(ptr::null()) }, 0);
    assert_eq!(unsafe { rt_report_verdict(ptr::null()) }, -1);
    assert!(unsafe { rt_rat_to_f64(ptr::null()) }.is_nan());
    unsafe {
        rt_rat_free(ptr::null_mut());
        rt_run_free(ptr::null_mut());
        rt_report_free(ptr::null_mut());
        rt_string_free(ptr::null_mut());
    }
}

#[test]
fn floor_to_grid_negative() {
    let x = rat("-1/3");
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { rt_floor_to_grid(x, 2, &mut f) }, RtStatus::Ok);
    assert_eq!(text(f), "-17/50");
    unsafe {
        rt_rat_free(x);
        rt_rat_free(f);
    }
}

#[test]
fn error_bound_w() {
    let h = rat("13366894627923/150000000000000000");
    let f = CString::new("W").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { rt_error_bound(f.as_ptr(), h, 14, 30000, &mut out) }, RtStatus::Ok);
    let v = unsafe { rt_rat_to_f64(out) };
    assert!(v > 0.0 && v <= 127e-9, "{v}");
    let bad = CString::new("P").unwrap();
    let mut o2 = ptr::null_mut();
    assert_eq!(unsafe { rt_error_bound(bad.as_ptr(), h, 14, 30000, &mut o2) }, RtStatus::Parse);
    unsafe {
        rt_rat_free(h);
        rt_rat_free(out);
    }
}

#[test]
fn short_run_and_components() {
    let (t, a, b) = (rat("1/100"), rat("43170475352787/10000000000000"), rat("0"));
    let f = CString::new("W").unwrap();
    let mut run = ptr::null_mut();
    assert_eq!(unsafe { rt_run(f.as_ptr(), t, a, b, 100, 14, &mut run) }, RtStatus::Ok);
    assert_eq!(unsafe { rt_run_certified(run) }, 1);
    assert_eq!(unsafe { rt_run_dim(run) }, 5);
    let mut x = ptr::null_mut();
    assert_eq!(unsafe { rt_run_final(run, 4, &mut x) }, RtStatus::Ok);
    assert!(unsafe { rt_rat_to_f64(x) } > 0.0);
    assert_eq!(unsafe { rt_run_final(run, 5, &mut x) }, RtStatus::OutOfRange);
    let mut ht = ptr::null_mut();
    assert_eq!(unsafe { rt_run_h_tilde(run, &mut ht) }, RtStatus::Ok);
    let mut js = ptr::null_mut();
    assert_eq!(unsafe { rt_run_to_json(run, &mut js) }, RtStatus::Ok);
    let json = unsafe { CStr::from_ptr(js) }.to_str().unwrap().to_string();
    assert!(json.contains("\"certified\": true"));
    let mut zero = ptr::null_mut();
    assert_eq!(unsafe { rt_run(f.as_ptr(), t, a, b, 0, 14, &mut zero) }, RtStatus::Domain);
    unsafe {
        rt_string_free(js);
        rt_rat_free(x);
        rt_rat_free(ht);
        rt_run_free(run);
        for r in [t, a, b] {
            rt_rat_free(r);
        }
    }
}

#[test]
fn intro_report() {
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { rt_repro_intro(&mut r) }, RtStatus::Ok);
    assert_eq!(unsafe { rt_report_verdict(r) }, 0);
    let mut js = ptr::null_mut();
    assert_eq!(unsafe { rt_report_to_json(r, &mut js) }, RtStatus::Ok);
    assert!(unsafe { CStr::from_ptr(js) }.to_str().unwrap().contains("12709/25000"));
    unsafe {
        rt_string_free(js);
        rt_report_free(r);
    }
}

#[test]
fn verify_rejects_bad_input() {
    let mut r = ptr::null_mut();
    let t = CString::new("lemma9").unwrap();
    assert_eq!(unsafe { rt_verify(t.as_ptr(), ptr::null(), 0, &mut r) }, RtStatus::Parse);
    let t = CString::new("full").unwrap();
    let cfg = CString::new("a0 = 4.3").unwrap();
    assert_eq!(unsafe { rt_verify(t.as_ptr(), cfg.as_ptr(), 0, &mut r) }, RtStatus::Parse);
    assert!(last_error().contains("a0"));
    assert!(r.is_null());
}

#[test]
fn header_is_valid_c() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let header = format!("{dir}/include/rtaylor.h");
    let src = std::env::temp_dir().join("rtaylor_header_check.c");
    std::fs::write(&src, "#include \"rtaylor.h\"\nint main(void) { RtRat *r = 0; return rt_rat_parse(\"1/2\", &r) == RT_STATUS_OK ? 0 : 1; }\n").unwrap();
    assert!(std::path::Path::new(&header).exists());
    match Command::new("cc").args(["-fsyntax-only", "-Wall", "-Werror", "-I"]).arg(format!("{dir}/include")).arg(&src).status() {
        Ok(s) => assert!(s.success(), "header does not compile"),
        Err(_) => eprintln!("no C compiler; header syntax not checked"),
    }
}
