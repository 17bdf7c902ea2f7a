//! C ABI over `rcalg`. Handles are opaque and owned by the caller, who
//! releases them with the matching `_free`. Every fallible call returns an
//! [`RcalgStatus`]; the message of the last failure on the calling thread is
//! available from [`rcalg_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rcalg::bitset::AtomSet;
use rcalg::kernel::{generated_subalgebra, is_free_over, Elem, FiniteBA, SubalgebraDesc};
use rcalg::report::{to_json, to_text, Report};
use rcalg::spec::{parse_spec, RunSpec};
use rcalg::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RcalgStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Capacity = 4,
    Precondition = 5,
    Usage = 6,
    DegenerateQuotient = 7,
    InconsistentExtension = 8,
    PresentationInconsistent = 9,
    AlgebraMismatch = 10,
    Io = 11,
    Panic = 12,
}

impl From<&Error> for RcalgStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Capacity { .. } => RcalgStatus::Capacity,
            Error::AlgebraMismatch => RcalgStatus::AlgebraMismatch,
            Error::DegenerateQuotient => RcalgStatus::DegenerateQuotient,
            Error::InconsistentExtension => RcalgStatus::InconsistentExtension,
            Error::PresentationInconsistent { .. } => RcalgStatus::PresentationInconsistent,
            Error::InvalidLadder(_) | Error::Usage(_) => RcalgStatus::Usage,
            Error::Precondition(_) => RcalgStatus::Precondition,
            Error::Parse(_) => RcalgStatus::Parse,
            Error::Io(_) => RcalgStatus::Io,
        }
    }
}

/// A finished report with its JSON and text renderings.
pub struct RcalgReport {
    report: Report,
    json: CString,
    text: CString,
}

/// A finite Boolean algebra with at most 64 atoms.
pub struct RcalgAlgebra {
    ba: FiniteBA,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), (RcalgStatus, String)>) -> RcalgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            RcalgStatus::Ok
        }
        Ok(Err((st, msg))) => {
            set_error(&msg);
            st
        }
        Err(_) => {
            set_error("internal panic");
            RcalgStatus::Panic
        }
    }
}

fn fail(e: Error) -> (RcalgStatus, String) {
    (RcalgStatus::from(&e), e.to_string())
}

fn null(what: &str) -> (RcalgStatus, String) {
    (RcalgStatus::NullArgument, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (RcalgStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (RcalgStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn finish(report: Report) -> Box<RcalgReport> {
    let json = CString::new(to_json(&report)).unwrap_or_default();
    let text = CString::new(to_text(&report)).unwrap_or_default();
    Box::new(RcalgReport { report, json, text })
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn rcalg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn rcalg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Parses a JSON run spec and runs it.
///
/// # Safety
/// `spec_json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rcalg_run_spec(
    spec_json: *const c_char,
    timings: bool,
    out: *mut *mut RcalgReport,
) -> RcalgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let spec = parse_spec(str_arg(spec_json, "spec_json")?).map_err(fail)?;
        let r = rcalg::run::run(&spec, timings).map_err(fail)?;
        *out = Box::into_raw(finish(r));
        Ok(())
    })
}

/// Runs the oracle suite with the given seed.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rcalg_selftest(seed: u64, out: *mut *mut RcalgReport) -> RcalgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let r = rcalg::run::run(&RunSpec::selftest(seed), false).map_err(fail)?;
        *out = Box::into_raw(finish(r));
        Ok(())
    })
}

/// True when the report has no invariant violations.
///
/// # Safety
/// `r` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn rcalg_report_ok(r: *const RcalgReport) -> bool {
    r.as_ref().is_some_and(|r| r.report.ok())
}

/// # Safety
/// `r` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn rcalg_report_section_count(r: *const RcalgReport) -> usize {
    r.as_ref().map_or(0, |r| r.report.sections.len())
}

/// Canonical JSON. Owned by the handle.
///
/// # Safety
/// `r` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn rcalg_report_json(r: *const RcalgReport) -> *const c_char {
    r.as_ref().map_or(ptr::null(), |r| r.json.as_ptr())
}

/// Text rendering. Owned by the handle.
///
/// # Safety
/// `r` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn rcalg_report_text(r: *const RcalgReport) -> *const c_char {
    r.as_ref().map_or(ptr::null(), |r| r.text.as_ptr())
}

/// # Safety
/// `r` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rcalg_report_free(r: *mut RcalgReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// The power set of `atoms` atoms, `1 <= atoms <= 64`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rcalg_algebra_new(
    atoms: usize,
    out: *mut *mut RcalgAlgebra,
) -> RcalgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        if atoms == 0 || atoms > 64 {
            return Err((
                RcalgStatus::Capacity,
                format!("{atoms} atoms; the C interface takes 1 to 64"),
            ));
        }
        let ba = FiniteBA::new(atoms).map_err(fail)?;
        *out = Box::into_raw(Box::new(RcalgAlgebra { ba }));
        Ok(())
    })
}

/// # Safety
/// `a` must be null or a live algebra handle.
#[no_mangle]
pub unsafe extern "C" fn rcalg_algebra_atom_count(a: *const RcalgAlgebra) -> usize {
    a.as_ref().map_or(0, |a| a.ba.atom_count())
}

/// # Safety
/// `a` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rcalg_algebra_free(a: *mut RcalgAlgebra) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

unsafe fn subalgebra(
    a: &RcalgAlgebra,
    gens: *const u64,
    n_gens: usize,
) -> Result<SubalgebraDesc, (RcalgStatus, String)> {
    if gens.is_null() && n_gens > 0 {
        return Err(null("gens"));
    }
    let masks = if n_gens == 0 {
        &[][..]
    } else {
        std::slice::from_raw_parts(gens, n_gens)
    };
    let ge: Vec<Elem> = masks
        .iter()
        .map(|&m| elem(&a.ba, m))
        .collect::<Result<_, _>>()?;
    generated_subalgebra(&a.ba, &ge).map_err(fail)
}

fn elem(ba: &FiniteBA, mask: u64) -> Result<Elem, (RcalgStatus, String)> {
    let n = ba.atom_count();
    if n < 64 && mask >> n != 0 {
        return Err((
            RcalgStatus::Usage,
            format!("bitset {mask:#x} has bits beyond {n} atoms"),
        ));
    }
    ba.elem(AtomSet::from_mask(n, mask)).map_err(fail)
}

/// Lower projection of `b` into the subalgebra generated by `gens`, as
/// atom bitsets (atom 0 is bit 0).
///
/// # Safety
/// `gens` must point to `n_gens` values, `out` to writable memory.
#[no_mangle]
pub unsafe extern "C" fn rcalg_lpr(
    a: *const RcalgAlgebra,
    gens: *const u64,
    n_gens: usize,
    b: u64,
    out: *mut u64,
) -> RcalgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let a = a.as_ref().ok_or_else(|| null("algebra"))?;
        let (ba, sub) = (&a.ba, subalgebra(a, gens, n_gens)?);
        let l = sub.lpr(ba, &elem(ba, b)?).map_err(fail)?;
        *out = l.atoms().to_mask();
        Ok(())
    })
}

/// Whether the algebra is free over the subalgebra generated by `gens`.
///
/// # Safety
/// `gens` must point to `n_gens` values, `out` to writable memory.
#[no_mangle]
pub unsafe extern "C" fn rcalg_is_free_over(
    a: *const RcalgAlgebra,
    gens: *const u64,
    n_gens: usize,
    out: *mut bool,
) -> RcalgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let a = a.as_ref().ok_or_else(|| null("algebra"))?;
        let (ba, sub) = (&a.ba, subalgebra(a, gens, n_gens)?);
        *out = is_free_over(ba, &sub).map_err(fail)?;
        Ok(())
    })
}
