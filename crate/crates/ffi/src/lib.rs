//! C ABI over `fatpoint`.
//!
//! Every function returns an [`FpStatus`]; results go through out-pointers.
//! Strings handed out are NUL-terminated, owned by the caller and released
//! with [`fp_string_free`]. On failure the thread's last error message is
//! available from [`fp_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fatpoint::averaged::roe_r;
use fatpoint::bounds::{bound_report, lambda, lambda_bound, BoundReport};
use fatpoint::lattice::lambda_certificate;
use fatpoint::unloading::{roe_r_block, roe_r_checked, roe_r_naive};
use fatpoint::Error;
use serde_json::json;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FpStatus {
    Ok = 0,
    NullPointer = 1,
    /// Arguments outside the domain of the operation.
    InvalidArgument = 2,
    /// A computed result failed an internal cross-check.
    VerificationFailed = 3,
    /// A Rust panic was caught at the boundary.
    Internal = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FpEngine {
    Block = 0,
    Naive = 1,
    /// Run both and fail with `FP_STATUS_VERIFICATION_FAILED` on disagreement.
    Both = 2,
}

/// Opaque bound report for one `(m, n)`.
pub struct FpBoundReport(BoundReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> FpStatus {
    match err {
        Error::EngineDisagreement { .. }
        | Error::LambdaNotAboveR { .. }
        | Error::CertificateCheck(_) => FpStatus::VerificationFailed,
        _ => FpStatus::InvalidArgument,
    }
}

/// Runs `f`, recording any error or panic as the last error.
fn guard(f: impl FnOnce() -> Result<(), FpStatus>) -> FpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FpStatus::Ok,
        Ok(Err(status)) => status,
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            FpStatus::Internal
        }
    }
}

fn fail(err: Error) -> FpStatus {
    set_error(err.to_string());
    status_of(&err)
}

fn null(name: &str) -> FpStatus {
    set_error(format!("{name} is null"));
    FpStatus::NullPointer
}

fn need<T>(out: *mut T) -> Result<(), FpStatus> {
    if out.is_null() {
        return Err(null("out"));
    }
    Ok(())
}

fn out_string(out: *mut *mut c_char, s: String) -> Result<(), FpStatus> {
    if out.is_null() {
        return Err(null("out"));
    }
    let c = CString::new(s).expect("library strings contain no NUL");
    // SAFETY: checked non-null; the caller guarantees it is writable.
    unsafe { *out = c.into_raw() };
    Ok(())
}

fn out_u64(out: *mut u64, v: u64) -> Result<(), FpStatus> {
    if out.is_null() {
        return Err(null("out"));
    }
    // SAFETY: checked non-null; the caller guarantees it is writable.
    unsafe { *out = v };
    Ok(())
}

/// Message for the most recent failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn fp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn fp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// `lambda_n` as `"p/q"` (or `"p"` when integral).
///
/// # Safety
/// `out` must be a valid pointer to write a string pointer into.
#[no_mangle]
pub unsafe extern "C" fn fp_lambda(n: u64, out: *mut *mut c_char) -> FpStatus {
    guard(|| {
        need(out)?;
        out_string(out, lambda(n).map_err(fail)?.to_string())
    })
}

/// `ceil(m lambda_n)`.
///
/// # Safety
/// `out` must be a valid pointer to a `uint64_t`.
#[no_mangle]
pub unsafe extern "C" fn fp_lambda_bound(m: u64, n: u64, out: *mut u64) -> FpStatus {
    guard(|| {
        need(out)?;
        out_u64(out, lambda_bound(m, n).map_err(fail)?)
    })
}

/// `R(m, n)` from the unloading algorithm. `engine` is an [`FpEngine`]
/// value; anything else is rejected as an invalid argument.
///
/// # Safety
/// `out` must be a valid pointer to a `uint64_t`.
#[no_mangle]
#[allow(non_snake_case)]
pub unsafe extern "C" fn fp_roe_R(m: u64, n: u64, engine: u32, out: *mut u64) -> FpStatus {
    guard(|| {
        need(out)?;
        let v = match engine {
            e if e == FpEngine::Block as u32 => roe_r_block(m, n).map(|r| r.value),
            e if e == FpEngine::Naive as u32 => roe_r_naive(m, n, false).map(|r| r.value),
            e if e == FpEngine::Both as u32 => roe_r_checked(m, n),
            other => {
                set_error(format!("unknown engine {other}"));
                return Err(FpStatus::InvalidArgument);
            }
        };
        out_u64(out, v.map_err(fail)?)
    })
}

/// The averaged constant `r(n)` as `"p/q"`.
///
/// # Safety
/// `out` must be a valid pointer to write a string pointer into.
#[no_mangle]
pub unsafe extern "C" fn fp_roe_r(n: u64, out: *mut *mut c_char) -> FpStatus {
    guard(|| {
        need(out)?;
        out_string(out, roe_r(n).map_err(fail)?.to_string())
    })
}

/// Computes every bound for `(m, n)`. Release with [`fp_bound_report_free`].
///
/// # Safety
/// `out` must be a valid pointer to write a handle into.
#[no_mangle]
pub unsafe extern "C" fn fp_bound_report_new(
    m: u64,
    n: u64,
    out: *mut *mut FpBoundReport,
) -> FpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let report = bound_report(m, n).map_err(fail)?;
        *out = Box::into_raw(Box::new(FpBoundReport(report)));
        Ok(())
    })
}

/// # Safety
/// `report` must be null or a handle from [`fp_bound_report_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fp_bound_report_free(report: *mut FpBoundReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

unsafe fn with_report<'a>(report: *const FpBoundReport) -> Result<&'a BoundReport, FpStatus> {
    report.as_ref().map(|r| &r.0).ok_or_else(|| null("report"))
}

/// The largest lower bound in the report.
///
/// # Safety
/// `report` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fp_bound_report_best(
    report: *const FpBoundReport,
    out: *mut u64,
) -> FpStatus {
    guard(|| out_u64(out, with_report(report)?.best))
}

/// Name of the bound that produced the best value, e.g. `"lambda"`.
///
/// # Safety
/// `report` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fp_bound_report_best_source(
    report: *const FpBoundReport,
    out: *mut *mut c_char,
) -> FpStatus {
    guard(|| {
        let src = json!(with_report(report)?.best_source);
        out_string(out, src.as_str().unwrap_or_default().to_string())
    })
}

/// `ceil(m lambda_n)` as recorded in the report.
///
/// # Safety
/// `report` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fp_bound_report_lambda_bound(
    report: *const FpBoundReport,
    out: *mut u64,
) -> FpStatus {
    guard(|| out_u64(out, with_report(report)?.lambda_bound))
}

/// `R(m, n)`; `*present` is set to false when `n < 3`.
///
/// # Safety
/// `report` must be a live handle; `out` and `present` valid pointers.
#[no_mangle]
#[allow(non_snake_case)]
pub unsafe extern "C" fn fp_bound_report_roe_R(
    report: *const FpBoundReport,
    out: *mut u64,
    present: *mut bool,
) -> FpStatus {
    guard(|| {
        if present.is_null() {
            return Err(null("present"));
        }
        let v = with_report(report)?.roe_r;
        *present = v.is_some();
        out_u64(out, v.unwrap_or(0))
    })
}

/// The exact value `d(m, n)` for `n <= 9`; `*present` is false otherwise.
///
/// # Safety
/// `report` must be a live handle; `out` and `present` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn fp_bound_report_exact(
    report: *const FpBoundReport,
    out: *mut u64,
    present: *mut bool,
) -> FpStatus {
    guard(|| {
        if present.is_null() {
            return Err(null("present"));
        }
        let v = with_report(report)?.exact_small_n;
        *present = v.is_some();
        out_u64(out, v.unwrap_or(0))
    })
}

/// The whole report as JSON with a top-level `"schema": 1`.
///
/// # Safety
/// `report` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fp_bound_report_to_json(
    report: *const FpBoundReport,
    out: *mut *mut c_char,
) -> FpStatus {
    guard(|| {
        let v = json!({ "schema": 1, "report": with_report(report)? });
        out_string(out, v.to_string())
    })
}

/// The nef certificate behind `lambda_n` as JSON with `"schema": 1`.
///
/// # Safety
/// `out` must be a valid pointer to write a string pointer into.
#[no_mangle]
pub unsafe extern "C" fn fp_lambda_certificate_json(n: u64, out: *mut *mut c_char) -> FpStatus {
    guard(|| {
        need(out)?;
        let cert = lambda_certificate(n).map_err(fail)?;
        out_string(out, json!({ "schema": 1, "certificate": cert }).to_string())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CStr;

    fn take(s: *mut c_char) -> String {
        let v = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
        unsafe { fp_string_free(s) };
        v
    }

    #[test]
    fn lambda_roundtrip() {
        let mut s = ptr::null_mut();
        assert_eq!(unsafe { fp_lambda(12, &mut s) }, FpStatus::Ok);
        assert_eq!(take(s), "36/11");
    }

    #[test]
    fn errors_set_message() {
        let mut s = ptr::null_mut();
        assert_eq!(unsafe { fp_roe_r(2, &mut s) }, FpStatus::InvalidArgument);
        assert!(s.is_null());
        let msg = unsafe { CStr::from_ptr(fp_last_error()) }.to_str().unwrap();
        assert!(msg.contains("n must be at least 3"), "{msg}");
    }

    #[test]
    fn null_out_is_rejected() {
        assert_eq!(
            unsafe { fp_lambda_bound(1, 4, ptr::null_mut()) },
            FpStatus::NullPointer
        );
    }
}
