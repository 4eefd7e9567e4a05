//! C ABI over the conjrep engine.
//!
//! Every function returns a [`ConjrepStatus`]. On failure a message is kept
//! per thread and can be read with [`conjrep_last_error`]. Handles are not
//! synchronized: a [`ConjrepGroup`] may move between threads but must not be
//! used from two threads at once.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use conjrep::ortho3::{f3_exhaustive, FormKind};
use conjrep::verify::{self, default_checks, parse_checks, Analysis, VerifyConfig};
use conjrep::Error;

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConjrepStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    BudgetExceeded = 3,
    InvariantFailed = 4,
    BufferTooSmall = 5,
    Io = 6,
    Panic = 7,
}

/// Form selector for [`conjrep_f3`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConjrepForm {
    Split = 0,
    Trace = 1,
}

/// A built SL2(Z/p^nZ) with its classes; the character table and the
/// decomposition are computed on first request.
pub struct ConjrepGroup {
    analysis: Analysis,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> ConjrepStatus {
    match e {
        Error::BudgetExceeded { .. } => ConjrepStatus::BudgetExceeded,
        Error::Io(_) => ConjrepStatus::Io,
        _ if e.exit_code() == 1 => ConjrepStatus::InvariantFailed,
        _ => ConjrepStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (ConjrepStatus, String)>) -> ConjrepStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ConjrepStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            ConjrepStatus::Panic
        }
    }
}

fn lift(e: Error) -> (ConjrepStatus, String) {
    (status_of(&e), e.to_string())
}

fn null() -> (ConjrepStatus, String) {
    (ConjrepStatus::NullPointer, "null pointer argument".into())
}

unsafe fn write_slice(
    values: &[u64],
    out: *mut u64,
    cap: usize,
    len: *mut usize,
) -> Result<(), (ConjrepStatus, String)> {
    if len.is_null() {
        return Err(null());
    }
    *len = values.len();
    if cap < values.len() {
        return Err((
            ConjrepStatus::BufferTooSmall,
            format!("buffer holds {cap} values, {} needed", values.len()),
        ));
    }
    if out.is_null() {
        return Err(null());
    }
    ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    Ok(())
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn conjrep_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Frees a string returned by this library. NULL is accepted.
///
/// # Safety
/// `s` must be NULL or a pointer obtained from this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn conjrep_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds SL2(Z/p^nZ). A budget of 0 selects the default.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn conjrep_group_new(p: u64, n: u32, budget: u64, out: *mut *mut ConjrepGroup) -> ConjrepStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        *out = ptr::null_mut();
        let budget = if budget == 0 {
            conjrep::sl2::DEFAULT_BUDGET
        } else {
            budget
        };
        let analysis = Analysis::build(p, n, budget).map_err(lift)?;
        *out = Box::into_raw(Box::new(ConjrepGroup { analysis }));
        Ok(())
    })
}

/// Releases a handle. NULL is accepted.
///
/// # Safety
/// `g` must be NULL or a handle from [`conjrep_group_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn conjrep_group_free(g: *mut ConjrepGroup) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live handle and `order` writable.
#[no_mangle]
pub unsafe extern "C" fn conjrep_group_order(g: *const ConjrepGroup, order: *mut u64) -> ConjrepStatus {
    guard(|| {
        let (Some(g), false) = (g.as_ref(), order.is_null()) else {
            return Err(null());
        };
        *order = g.analysis.classes.group_order();
        Ok(())
    })
}

/// Number of conjugacy classes.
///
/// # Safety
/// `g` must be a live handle and `k` writable.
#[no_mangle]
pub unsafe extern "C" fn conjrep_group_class_count(g: *const ConjrepGroup, k: *mut usize) -> ConjrepStatus {
    guard(|| {
        let (Some(g), false) = (g.as_ref(), k.is_null()) else {
            return Err(null());
        };
        *k = g.analysis.classes.k();
        Ok(())
    })
}

/// Copies the class sizes into `out`. `*len` receives the class count even
/// when the buffer is too small.
///
/// # Safety
/// `g` must be a live handle, `out` valid for `cap` values, `len` writable.
#[no_mangle]
pub unsafe extern "C" fn conjrep_group_class_sizes(
    g: *const ConjrepGroup,
    out: *mut u64,
    cap: usize,
    len: *mut usize,
) -> ConjrepStatus {
    guard(|| {
        let g = g.as_ref().ok_or_else(null)?;
        write_slice(g.analysis.classes.sizes(), out, cap, len)
    })
}

/// Character degrees in table order (the trivial character first).
///
/// # Safety
/// As for [`conjrep_group_class_sizes`]; `g` must not be used concurrently.
#[no_mangle]
pub unsafe extern "C" fn conjrep_group_degrees(
    g: *mut ConjrepGroup,
    out: *mut u64,
    cap: usize,
    len: *mut usize,
) -> ConjrepStatus {
    guard(|| {
        let g = g.as_mut().ok_or_else(null)?;
        let degrees = g.analysis.table().map_err(lift)?.degrees().to_vec();
        write_slice(&degrees, out, cap, len)
    })
}

/// Multiplicities of the irreducible characters in the conjugation
/// character, in table order.
///
/// # Safety
/// As for [`conjrep_group_degrees`].
#[no_mangle]
pub unsafe extern "C" fn conjrep_group_multiplicities(
    g: *mut ConjrepGroup,
    out: *mut u64,
    cap: usize,
    len: *mut usize,
) -> ConjrepStatus {
    guard(|| {
        let g = g.as_mut().ok_or_else(null)?;
        let dec = g.analysis.decomposition().map_err(lift)?;
        let m: Vec<u64> = dec.rows().iter().map(|r| r.multiplicity).collect();
        write_slice(&m, out, cap, len)
    })
}

/// Character table CSV as a newly allocated string, freed with
/// [`conjrep_string_free`].
///
/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn conjrep_group_table_csv(g: *mut ConjrepGroup, out: *mut *mut c_char) -> ConjrepStatus {
    guard(|| {
        let (Some(g), false) = (g.as_mut(), out.is_null()) else {
            return Err(null());
        };
        let table = g.analysis.table().map_err(lift)?;
        let mut buf = Vec::new();
        table.write_csv(&mut buf).map_err(|e| lift(e.into()))?;
        *out = CString::new(buf).expect("csv has no NUL").into_raw();
        Ok(())
    })
}

/// Runs the checks named in `checks` (comma-separated; NULL or empty for the
/// defaults) and returns the report JSON. `*pass` tells whether every check
/// passed. A budget of 0 selects the default.
///
/// # Safety
/// `checks` must be NULL or a NUL-terminated string; `out` and `pass`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn conjrep_verify_json(
    p: u64,
    n: u32,
    budget: u64,
    checks: *const c_char,
    out: *mut *mut c_char,
    pass: *mut bool,
) -> ConjrepStatus {
    guard(|| {
        if out.is_null() || pass.is_null() {
            return Err(null());
        }
        *out = ptr::null_mut();
        let list = if checks.is_null() {
            ""
        } else {
            CStr::from_ptr(checks)
                .to_str()
                .map_err(|_| (ConjrepStatus::InvalidArgument, "checks is not UTF-8".to_string()))?
        };
        let checks = if list.trim().is_empty() {
            default_checks(p, n)
        } else {
            parse_checks(list).map_err(lift)?
        };
        let mut cfg = VerifyConfig::new(p, n);
        cfg.checks = checks;
        if budget != 0 {
            cfg.budget = budget;
        }
        let report = verify::run(&cfg).map_err(lift)?;
        *pass = report.pass();
        *out = CString::new(report.to_json()).expect("json has no NUL").into_raw();
        Ok(())
    })
}

/// Exhaustive Omega-orbit check over F_q for one form, given as a
/// [`ConjrepForm`] value.
///
/// # Safety
/// `pass` must be writable.
#[no_mangle]
pub unsafe extern "C" fn conjrep_f3(q: u64, form: u32, pass: *mut bool) -> ConjrepStatus {
    guard(|| {
        if pass.is_null() {
            return Err(null());
        }
        if q > verify::F3_MAX_Q {
            return Err(lift(Error::ParamOutOfRange(format!(
                "q = {q} is above {}",
                verify::F3_MAX_Q
            ))));
        }
        let kind = match form {
            f if f == ConjrepForm::Split as u32 => FormKind::Split,
            f if f == ConjrepForm::Trace as u32 => FormKind::Trace,
            f => return Err((ConjrepStatus::InvalidArgument, format!("unknown form {f}"))),
        };
        let r = f3_exhaustive(q, kind, conjrep::sl2::DEFAULT_BUDGET).map_err(lift)?;
        *pass = r.pass();
        Ok(())
    })
}
