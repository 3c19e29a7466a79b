//! C ABI over `flcheck-core`.
//!
//! Objects are opaque handles created and destroyed through this API.
//! Functions return an `FlcStatus`; on failure the message is available
//! from `flc_last_error` until the next call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use flcheck_core::flcheck::{global_formulas, run_case, CaseFile, CaseReport};
use flcheck_core::rootdata::{build_root_datum, GroupKind};
use flcheck_core::Error;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidInput = 4,
    BadCharacteristic = 5,
    UnsupportedOrder = 6,
    PrecisionExhausted = 7,
    WildRamification = 8,
    NotCoprime = 9,
    Inconsistent = 10,
    NotGRegular = 11,
    NotRegular = 12,
    Unsupported = 13,
    CombinatorialBlowup = 14,
    UnsupportedKappa = 15,
    UnsupportedH = 16,
    HypothesisViolated = 17,
    DivisionByZero = 18,
    Io = 19,
    Panic = 20,
}

fn status_of(e: &Error) -> FlcStatus {
    match e {
        Error::BadCharacteristic { .. } => FlcStatus::BadCharacteristic,
        Error::UnsupportedOrder(_) => FlcStatus::UnsupportedOrder,
        Error::PrecisionExhausted(_) => FlcStatus::PrecisionExhausted,
        Error::WildRamification { .. } => FlcStatus::WildRamification,
        Error::NotCoprime => FlcStatus::NotCoprime,
        Error::Inconsistent(_) => FlcStatus::Inconsistent,
        Error::NotGRegular => FlcStatus::NotGRegular,
        Error::NotRegular => FlcStatus::NotRegular,
        Error::Unsupported(_) => FlcStatus::Unsupported,
        Error::CombinatorialBlowup(_) => FlcStatus::CombinatorialBlowup,
        Error::UnsupportedKappa(_) => FlcStatus::UnsupportedKappa,
        Error::UnsupportedH(_) => FlcStatus::UnsupportedH,
        Error::HypothesisViolated(_) => FlcStatus::HypothesisViolated,
        Error::Parse { .. } => FlcStatus::Parse,
        Error::InvalidInput(_) => FlcStatus::InvalidInput,
        Error::DivisionByZero => FlcStatus::DivisionByZero,
        Error::Io(_) => FlcStatus::Io,
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(status: FlcStatus, msg: &str) -> FlcStatus {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
    status
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(e: &Error) -> FlcStatus {
    set_error(status_of(e), &e.to_string())
}

/// Run `f`, converting panics into `FLC_STATUS_PANIC`.
fn guarded(f: impl FnOnce() -> FlcStatus + std::panic::UnwindSafe) -> FlcStatus {
    clear_error();
    match std::panic::catch_unwind(f) {
        Ok(s) => s,
        Err(_) => set_error(FlcStatus::Panic, "internal panic"),
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, FlcStatus> {
    if s.is_null() {
        return Err(set_error(FlcStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| set_error(FlcStatus::InvalidUtf8, "argument is not UTF-8"))
}

/// Opaque parsed case file.
pub struct FlcCase {
    inner: CaseFile,
}

/// Opaque case report.
pub struct FlcReport {
    inner: CaseReport,
}

/// Global dimension formulas.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct FlcFormulas {
    pub dim_a: i64,
    pub dim_pa: i64,
    pub delta_sum_bound: i64,
}

/// Message of the last failure on this thread, or NULL. Owned by the
/// library; valid until the next call.
#[no_mangle]
pub extern "C" fn flc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version string (static).
#[no_mangle]
pub extern "C" fn flc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Parse a JSON case file.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn flc_case_from_json(json: *const c_char, out: *mut *mut FlcCase) -> FlcStatus {
    guarded(|| {
        if out.is_null() {
            return set_error(FlcStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match CaseFile::parse(text) {
            Ok(c) => {
                *out = Box::into_raw(Box::new(FlcCase { inner: c }));
                FlcStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// # Safety
/// `case` must come from `flc_case_from_json` (or be NULL).
#[no_mangle]
pub unsafe extern "C" fn flc_case_free(case: *mut FlcCase) {
    if !case.is_null() {
        drop(Box::from_raw(case));
    }
}

/// Run a case. Errors inside the computation are recorded in the report;
/// the status only reflects argument problems.
///
/// # Safety
/// `case` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn flc_run_case(case: *const FlcCase, out: *mut *mut FlcReport) -> FlcStatus {
    guarded(|| {
        if case.is_null() || out.is_null() {
            return set_error(FlcStatus::NullPointer, "null argument");
        }
        let r = run_case(&(*case).inner);
        *out = Box::into_raw(Box::new(FlcReport { inner: r }));
        FlcStatus::Ok
    })
}

/// 1 if the case passed, 0 if not, -1 for a NULL handle.
///
/// # Safety
/// `report` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn flc_report_pass(report: *const FlcReport) -> i32 {
    if report.is_null() {
        return -1;
    }
    (*report).inner.pass as i32
}

/// Report as JSON with sorted keys. Free the result with `flc_string_free`.
///
/// # Safety
/// `report` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn flc_report_json(report: *const FlcReport, out: *mut *mut c_char) -> FlcStatus {
    guarded(|| {
        if report.is_null() || out.is_null() {
            return set_error(FlcStatus::NullPointer, "null argument");
        }
        match (*report).inner.to_json() {
            Ok(s) => {
                *out = CString::new(s).unwrap_or_default().into_raw();
                FlcStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// # Safety
/// `report` must come from `flc_run_case` (or be NULL).
#[no_mangle]
pub unsafe extern "C" fn flc_report_free(report: *mut FlcReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `s` must come from this library (or be NULL).
#[no_mangle]
pub unsafe extern "C" fn flc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Evaluate the global formulas for `kind` in {"GL", "SL", "PGL"}.
///
/// # Safety
/// `kind` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn flc_global_formulas(
    kind: *const c_char,
    n: u32,
    p: u32,
    genus: i64,
    deg_d: i64,
    out: *mut FlcFormulas,
) -> FlcStatus {
    guarded(|| {
        if out.is_null() {
            return set_error(FlcStatus::NullPointer, "null output pointer");
        }
        let kind = match read_str(kind) {
            Ok(k) => k,
            Err(s) => return s,
        };
        let res = kind
            .parse::<GroupKind>()
            .and_then(|k| build_root_datum(k, n as usize, p))
            .and_then(|rd| global_formulas(&rd, genus, deg_d));
        match res {
            Ok(g) => {
                *out = FlcFormulas { dim_a: g.dim_a, dim_pa: g.dim_pa, delta_sum_bound: g.delta_sum_bound };
                FlcStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_through_handles() {
        let json = CString::new(
            r#"{"id":"t","q":3,"p":3,"m":1,"kind":"SL","n":2,"mode":"ls",
               "a_h":{"torus":"unramified","y":"1*e"},"kappa":{"order":2,"vector":["1/2"]}}"#,
        )
        .unwrap();
        unsafe {
            let mut case = ptr::null_mut();
            assert_eq!(flc_case_from_json(json.as_ptr(), &mut case), FlcStatus::Ok);
            let mut rep = ptr::null_mut();
            assert_eq!(flc_run_case(case, &mut rep), FlcStatus::Ok);
            assert_eq!(flc_report_pass(rep), 1);
            let mut s = ptr::null_mut();
            assert_eq!(flc_report_json(rep, &mut s), FlcStatus::Ok);
            let text = CStr::from_ptr(s).to_str().unwrap().to_string();
            assert!(text.contains("\"lhs\":\"3\""));
            flc_string_free(s);
            flc_report_free(rep);
            flc_case_free(case);
        }
    }

    #[test]
    fn errors_set_last_error() {
        let bad = CString::new("{\"id\": ").unwrap();
        unsafe {
            let mut case = ptr::null_mut();
            assert_eq!(flc_case_from_json(bad.as_ptr(), &mut case), FlcStatus::Parse);
            assert!(case.is_null());
            assert!(!flc_last_error().is_null());
            let kind = CString::new("SL").unwrap();
            let mut f = FlcFormulas::default();
            assert_eq!(flc_global_formulas(kind.as_ptr(), 2, 3, 0, 2, &mut f), FlcStatus::Ok);
            assert_eq!((f.dim_a, f.dim_pa), (5, 1));
            assert!(flc_last_error().is_null());
            assert_eq!(flc_global_formulas(kind.as_ptr(), 2, 3, 3, 2, &mut f), FlcStatus::HypothesisViolated);
            assert_eq!(flc_case_from_json(ptr::null(), &mut case), FlcStatus::NullPointer);
        }
    }
}
