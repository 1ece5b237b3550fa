//! C ABI over rtaylor. Every object crosses the boundary as an opaque
//! handle owned by the caller and released with its `_free` function.
//! Functions return an [`RtStatus`]; on failure `rt_last_error` describes
//! what went wrong on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rtaylor::bounds::HypothesisConstants;
use rtaylor::exact::{floor_to_grid, GridSpec, Rat};
use rtaylor::fields::FieldName;
use rtaylor::integrator::{global_error_bound, round_taylor_run, RunConfig, RunRecord};
use rtaylor::pipeline::{repro_intro, run_proof, PipelineConfig, Report, Target};
use rtaylor::topology::Verdict;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Domain = 4,
    OutOfRange = 5,
    Panic = 6,
}

/// An exact rational.
pub struct RtRat(Rat);

/// The record of one Round Taylor run.
pub struct RtRun(RunRecord);

/// A pipeline report.
pub struct RtReport(Report);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

type FfiResult<T> = Result<T, (RtStatus, String)>;

fn guard(f: impl FnOnce() -> FfiResult<()>) -> RtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RtStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            RtStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err((RtStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (RtStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> FfiResult<&'a T> {
    p.as_ref().ok_or_else(|| (RtStatus::NullPointer, format!("{what} is null")))
}

unsafe fn put<T>(out: *mut *mut T, v: T) -> FfiResult<()> {
    if out.is_null() {
        return Err((RtStatus::NullPointer, "output pointer is null".into()));
    }
    *out = Box::into_raw(Box::new(v));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> FfiResult<()> {
    if out.is_null() {
        return Err((RtStatus::NullPointer, "output pointer is null".into()));
    }
    *out = CString::new(s).map_err(|_| (RtStatus::Domain, "string contains NUL".into()))?.into_raw();
    Ok(())
}

fn field_arg(s: &str) -> FfiResult<FieldName> {
    match FieldName::parse(s) {
        Some(f @ (FieldName::W | FieldName::G | FieldName::U)) => Ok(f),
        _ => Err((RtStatus::Parse, format!("field must be W, G or U, got {s:?}"))),
    }
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses `p/q` or an integer.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rt_rat_parse(text: *const c_char, out: *mut *mut RtRat) -> RtStatus {
    guard(|| {
        let s = str_arg(text, "text")?;
        let r: Rat = s.parse().map_err(|e| (RtStatus::Parse, format!("{e}")))?;
        put(out, RtRat(r))
    })
}

/// # Safety
/// `r` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rt_rat_free(r: *mut RtRat) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Canonical `p/q` text; free with `rt_string_free`.
///
/// # Safety
/// `r` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rt_rat_to_string(r: *const RtRat, out: *mut *mut c_char) -> RtStatus {
    guard(|| put_string(out, ref_arg(r, "r")?.0.to_string()))
}

/// Nearest double, for display only.
///
/// # Safety
/// `r` must be a live handle or null (giving NaN).
#[no_mangle]
pub unsafe extern "C" fn rt_rat_to_f64(r: *const RtRat) -> f64 {
    r.as_ref().map_or(f64::NAN, |r| r.0.to_f64())
}

/// Largest multiple of `10^-grid_exp` not above `x`.
///
/// # Safety
/// `x` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rt_floor_to_grid(x: *const RtRat, grid_exp: u32, out: *mut *mut RtRat) -> RtStatus {
    guard(|| {
        let x = ref_arg(x, "x")?;
        put(out, RtRat(floor_to_grid(&x.0, GridSpec::floor(grid_exp))))
    })
}

/// Global error bound H~ of an order-2 run of `field` with the published
/// hypothesis constants, step `h`, grid `10^-grid_exp` and `k` steps.
///
/// # Safety
/// `field` must be a NUL-terminated string, `h` a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rt_error_bound(field: *const c_char, h: *const RtRat, grid_exp: u32, k: u32, out: *mut *mut RtRat) -> RtStatus {
    guard(|| {
        let f = field_arg(str_arg(field, "field")?)?;
        let h = &ref_arg(h, "h")?.0;
        if h.signum() <= 0 {
            return Err((RtStatus::Domain, "h must be positive".into()));
        }
        let c = HypothesisConstants::published(f, h);
        let v = global_error_bound(&c, h, &GridSpec::floor(grid_exp).spacing(), k, 2).map_err(|e| (RtStatus::Domain, e.to_string()))?;
        put(out, RtRat(v))
    })
}

/// `Z_F(t, b, a, k)` on the grid `10^-grid_exp`.
///
/// # Safety
/// `field` must be a NUL-terminated string, `t`, `a`, `b` live handles and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rt_run(
    field: *const c_char,
    t: *const RtRat,
    a: *const RtRat,
    b: *const RtRat,
    k: u32,
    grid_exp: u32,
    out: *mut *mut RtRun,
) -> RtStatus {
    guard(|| {
        let f = field_arg(str_arg(field, "field")?)?;
        let (t, a, b) = (&ref_arg(t, "t")?.0, &ref_arg(a, "a")?.0, &ref_arg(b, "b")?.0);
        if k == 0 || t.signum() <= 0 {
            return Err((RtStatus::Domain, "need k > 0 and t > 0".into()));
        }
        put(out, RtRun(round_taylor_run(&RunConfig::proof_run(f, t, a, b, k, grid_exp))))
    })
}

/// # Safety
/// `r` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rt_run_free(r: *mut RtRun) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// 1 if the run is certified, 0 if not or if `r` is null.
///
/// # Safety
/// `r` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn rt_run_certified(r: *const RtRun) -> i32 {
    r.as_ref().map_or(0, |r| r.0.certified as i32)
}

/// Dimension of the state, or 0 for null.
///
/// # Safety
/// `r` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn rt_run_dim(r: *const RtRun) -> usize {
    r.as_ref().map_or(0, |r| r.0.z_final.len())
}

/// Component `i` of the final state.
///
/// # Safety
/// `r` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rt_run_final(r: *const RtRun, i: usize, out: *mut *mut RtRat) -> RtStatus {
    guard(|| {
        let r = ref_arg(r, "run")?;
        let v = r.0.z_final.get(i).ok_or_else(|| (RtStatus::OutOfRange, format!("component {i} of {}", r.0.z_final.len())))?;
        put(out, RtRat(v.clone()))
    })
}

/// The run's H~; fails with `Domain` when the run has no error bound.
///
/// # Safety
/// `r` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rt_run_h_tilde(r: *const RtRun, out: *mut *mut RtRat) -> RtStatus {
    guard(|| {
        let r = ref_arg(r, "run")?;
        let v = r.0.h_tilde.clone().ok_or_else(|| (RtStatus::Domain, "run has no error bound".into()))?;
        put(out, RtRat(v))
    })
}

/// # Safety
/// `r` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rt_run_to_json(r: *const RtRun, out: *mut *mut c_char) -> RtStatus {
    guard(|| {
        let r = ref_arg(r, "run")?;
        put_string(out, serde_json::to_string_pretty(&r.0).map_err(|e| (RtStatus::Domain, e.to_string()))?)
    })
}

/// Reproduces the introductory table.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rt_repro_intro(out: *mut *mut RtReport) -> RtStatus {
    guard(|| put(out, RtReport(repro_intro(6))))
}

/// Runs the proof up to `target` (`lemma1`..`lemma4`, `theta`, `full`).
/// `config` is key=value text or null for the published settings.
///
/// # Safety
/// `target` must be a NUL-terminated string, `config` one or null, `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn rt_verify(target: *const c_char, config: *const c_char, parallel: i32, out: *mut *mut RtReport) -> RtStatus {
    guard(|| {
        let tgt = match str_arg(target, "target")? {
            "lemma1" => Target::Lemma1,
            "lemma2" => Target::Lemma2,
            "lemma3" => Target::Lemma3,
            "lemma4" => Target::Lemma4,
            "theta" => Target::Theta,
            "full" => Target::Full,
            other => return Err((RtStatus::Parse, format!("unknown target {other:?}"))),
        };
        let mut cfg = if config.is_null() {
            PipelineConfig::default()
        } else {
            PipelineConfig::parse(str_arg(config, "config")?).map_err(|e| (RtStatus::Parse, e.to_string()))?
        };
        cfg.parallel = parallel != 0;
        put(out, RtReport(run_proof(&cfg, tgt)))
    })
}

/// # Safety
/// `r` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rt_report_free(r: *mut RtReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// 0 pass, 1 fail, 2 inconclusive; -1 for null.
///
/// # Safety
/// `r` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn rt_report_verdict(r: *const RtReport) -> i32 {
    r.as_ref().map_or(-1, |r| match r.0.verdict {
        Verdict::Pass => 0,
        Verdict::Fail => 1,
        Verdict::Inconclusive => 2,
    })
}

/// Report as JSON without timings; free with `rt_string_free`.
///
/// # Safety
/// `r` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rt_report_to_json(r: *const RtReport, out: *mut *mut c_char) -> RtStatus {
    guard(|| put_string(out, ref_arg(r, "report")?.0.to_json(false)))
}
