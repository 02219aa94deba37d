//! C ABI over the `fakeplane` library.
//!
//! Every function returns an [`FpStatus`]; on failure a message is kept per
//! thread and can be fetched with [`fp_last_error`]. Handles are opaque and
//! released with their `_free` function. Strings handed out by the library
//! are released with [`fp_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fakeplane::dimension::{dimension, ClassDataset};
use fakeplane::lfunctions::covolume;
use fakeplane::report::{run_all, Config, VerificationReport};
use fakeplane::scalars::fmt_rat;
use fakeplane::singularities::{dedekind_sum, hj_expand, CyclicSingularity};
use fakeplane::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    InvalidArgument = 4,
    NotAnInteger = 5,
    Unsupported = 6,
    Math = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

/// Configuration handle.
pub struct FpConfig(Config);

/// Verification report handle.
pub struct FpReport(VerificationReport);

/// Fixed-point class dataset handle.
pub struct FpDataset(ClassDataset);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FpStatus {
    match e {
        Error::Config(_) => FpStatus::Config,
        Error::InvalidArgument(_) => FpStatus::InvalidArgument,
        Error::NotAnInteger(_) => FpStatus::NotAnInteger,
        Error::Unsupported(_) => FpStatus::Unsupported,
        Error::Entry { source, .. } => status_of(source),
        _ => FpStatus::Math,
    }
}

enum Fail {
    Status(FpStatus, String),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> FpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FpStatus::Ok,
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            FpStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail::Status(FpStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::Status(FpStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn out_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = CString::new(s).map_err(|_| Fail::Status(FpStatus::Math, "string contains nul".into()))?.into_raw();
    Ok(())
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Message for the last failure on this thread, or null. Free with
/// `fp_string_free`.
#[no_mangle]
pub extern "C" fn fp_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |c| c.clone().into_raw()))
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn fp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fp_config_default(out: *mut *mut FpConfig) -> FpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = Box::into_raw(Box::new(FpConfig(Config::default())));
        Ok(())
    })
}

/// # Safety
/// `json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fp_config_from_json(json: *const c_char, out: *mut *mut FpConfig) -> FpStatus {
    guard(|| {
        let text = str_arg(json, "json")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = Box::into_raw(Box::new(FpConfig(Config::from_json(text)?)));
        Ok(())
    })
}

/// # Safety
/// `cfg` must be null or a handle from `fp_config_*`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fp_config_free(cfg: *mut FpConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Covolume as `p/q`.
///
/// # Safety
/// `cfg` must be a live config handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fp_covolume(cfg: *const FpConfig, out: *mut *mut c_char) -> FpStatus {
    guard(|| {
        let c = handle(cfg, "cfg")?;
        out_string(out, fmt_rat(&covolume(&c.0.volume_input())?))
    })
}

/// # Safety
/// `cfg` must be a live config handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fp_report_run(cfg: *const FpConfig, out: *mut *mut FpReport) -> FpStatus {
    guard(|| {
        let c = handle(cfg, "cfg")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = Box::into_raw(Box::new(FpReport(run_all(&c.0, None)?)));
        Ok(())
    })
}

/// # Safety
/// `report` must be a live report handle.
#[no_mangle]
pub unsafe extern "C" fn fp_report_entry_count(report: *const FpReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.entries.len())
}

/// 0 when no entry is a mismatch, 1 otherwise; -1 for a null handle.
///
/// # Safety
/// `report` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn fp_report_exit_code(report: *const FpReport) -> i32 {
    report.as_ref().map_or(-1, |r| r.0.exit_code())
}

/// # Safety
/// `report` must be a live report handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fp_report_to_json(report: *const FpReport, out: *mut *mut c_char) -> FpStatus {
    guard(|| out_string(out, handle(report, "report")?.0.to_json()))
}

/// # Safety
/// `report` must be a live report handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fp_report_to_markdown(report: *const FpReport, out: *mut *mut c_char) -> FpStatus {
    guard(|| out_string(out, handle(report, "report")?.0.to_markdown()))
}

/// # Safety
/// `report` must be null or a handle from `fp_report_run`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fp_report_free(report: *mut FpReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Dataset for `"gamma"` or `"gamma-tilde"`, honouring dataset paths in `cfg`.
///
/// # Safety
/// `cfg` must be a live config handle, `group` a nul-terminated string and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fp_dataset_load(cfg: *const FpConfig, group: *const c_char, out: *mut *mut FpDataset) -> FpStatus {
    guard(|| {
        let c = handle(cfg, "cfg")?;
        let g = str_arg(group, "group")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = Box::into_raw(Box::new(FpDataset(c.0.dataset(g)?)));
        Ok(())
    })
}

/// # Safety
/// `json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fp_dataset_from_json(json: *const c_char, out: *mut *mut FpDataset) -> FpStatus {
    guard(|| {
        let text = str_arg(json, "json")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = Box::into_raw(Box::new(FpDataset(ClassDataset::from_json(text)?)));
        Ok(())
    })
}

/// # Safety
/// `ds` must be a live dataset handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fp_dataset_dimension(ds: *const FpDataset, weight: u32, out: *mut i64) -> FpStatus {
    guard(|| {
        let d = handle(ds, "ds")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = dimension(&d.0, weight)?;
        Ok(())
    })
}

/// # Safety
/// `ds` must be null or a handle from `fp_dataset_*`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fp_dataset_free(ds: *mut FpDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Self-intersections of the resolution chain of `(n, q)`. `*len` receives
/// the chain length even when `cap` is too small.
///
/// # Safety
/// `buf` must hold `cap` values (may be null when `cap` is 0) and `len` must
/// be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fp_hj_expand(n: u32, q: u32, buf: *mut i64, cap: usize, len: *mut usize) -> FpStatus {
    guard(|| {
        if len.is_null() {
            return Err(null("len"));
        }
        let chain = hj_expand(&CyclicSingularity::new(n, q)?).self_intersections;
        *len = chain.len();
        if chain.len() > cap {
            return Err(Fail::Status(FpStatus::BufferTooSmall, format!("need {} slots, have {cap}", chain.len())));
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        ptr::copy_nonoverlapping(chain.as_ptr(), buf, chain.len());
        Ok(())
    })
}

/// `s(q, n)` as a reduced fraction.
///
/// # Safety
/// `num` and `den` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn fp_dedekind_sum(q: i64, n: i64, num: *mut i64, den: *mut i64) -> FpStatus {
    guard(|| {
        if num.is_null() || den.is_null() {
            return Err(null("num/den"));
        }
        let s = dedekind_sum(q, n)?;
        let wide = |_| Fail::Status(FpStatus::Math, "value exceeds 64 bits".into());
        *num = i64::try_from(s.numer()).map_err(wide)?;
        *den = i64::try_from(s.denom()).map_err(wide)?;
        Ok(())
    })
}
