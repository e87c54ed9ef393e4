//! C ABI over the `torichodge` library.
//!
//! Every entry point returns a [`TchStatus`]; results go through out-pointers.
//! Documents are opaque handles created by [`tch_document_parse`] and released
//! with [`tch_document_free`]. After a failing call, [`tch_last_error`] returns
//! the message of the most recent error on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use torichodge::cox::{hodge_dim_main, log_cohomology_oracle, GradedJacobianRing, HodgeValue};
use torichodge::document::Document;
use torichodge::linalg::int;
use torichodge::logforms::{cech_cohomology, LogSheaf};
use torichodge::polyhedra::fan_validate;
use torichodge::positivity::{is_ample, is_nef, support_function_from_divisor};
use torichodge::toric::{class_groups, is_log_smooth, is_proper, EquivariantSetup};
use torichodge::Error;

/// Status code returned by every function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TchStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    Precondition = 4,
    Hypotheses = 5,
    UnstableBox = 6,
    BufferTooSmall = 7,
    Unsupported = 8,
    Panic = 9,
}

/// Parsed input document.
pub struct TchDocument {
    doc: Document,
}

/// Summary of the fan and the equivariant setup of a document.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct TchFanInfo {
    pub rank: usize,
    pub num_rays: usize,
    pub num_max_cones: usize,
    pub relative_dim: usize,
    pub simplicial: bool,
    pub nonsingular: bool,
    pub proper: bool,
    pub log_smooth: bool,
    /// Free rank of Cl(P).
    pub class_group_rank: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn fail(status: TchStatus, msg: impl Into<String>) -> TchStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> TchStatus {
    let status = match &e {
        Error::InvalidInput(_) => TchStatus::InvalidInput,
        Error::Precondition(_) => TchStatus::Precondition,
        Error::Hypotheses(_) => TchStatus::Hypotheses,
        Error::UnstableBox(_) => TchStatus::UnstableBox,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> TchStatus) -> TchStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(TchStatus::Panic, "internal panic"),
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, TchStatus> {
    if p.is_null() {
        return Err(fail(TchStatus::NullArgument, "null string argument"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(TchStatus::InvalidUtf8, "string argument is not UTF-8"))
}

unsafe fn read_doc<'a>(d: *const TchDocument) -> Result<&'a TchDocument, TchStatus> {
    d.as_ref().ok_or_else(|| fail(TchStatus::NullArgument, "null document handle"))
}

fn setup_of(d: &TchDocument) -> Result<EquivariantSetup, TchStatus> {
    d.doc.setup().map_err(from_error)
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

macro_rules! lib {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => return from_error(e),
        }
    };
}

/// Parses a JSON document. On success `*out` owns a new handle.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tch_document_parse(json: *const c_char, out: *mut *mut TchDocument) -> TchStatus {
    guard(|| {
        if out.is_null() {
            return fail(TchStatus::NullArgument, "null out pointer");
        }
        *out = ptr::null_mut();
        let text = tri!(read_str(json));
        let doc = lib!(Document::parse(text));
        *out = Box::into_raw(Box::new(TchDocument { doc }));
        TchStatus::Ok
    })
}

/// Releases a handle from [`tch_document_parse`]. Null is ignored.
///
/// # Safety
/// `doc` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tch_document_free(doc: *mut TchDocument) {
    if !doc.is_null() {
        drop(Box::from_raw(doc));
    }
}

/// Validates the fan and fills `*out`. An invalid fan yields `InvalidInput`.
///
/// # Safety
/// `doc` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tch_fan_info(doc: *const TchDocument, out: *mut TchFanInfo) -> TchStatus {
    guard(|| {
        let d = tri!(read_doc(doc));
        let out = tri!(out.as_mut().ok_or_else(|| fail(TchStatus::NullArgument, "null out pointer")));
        let fan = lib!(d.doc.fan());
        let report = fan_validate(&fan);
        if !report.is_valid() {
            let msgs: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
            return fail(TchStatus::InvalidInput, format!("invalid fan: {}", msgs.join("; ")));
        }
        let s = tri!(setup_of(d));
        *out = TchFanInfo {
            rank: fan.ambient(),
            num_rays: fan.num_rays(),
            num_max_cones: fan.max_cones().len(),
            relative_dim: s.relative_dim(),
            simplicial: report.simplicial,
            nonsingular: report.nonsingular,
            proper: is_proper(&s),
            log_smooth: is_log_smooth(&s),
            class_group_rank: class_groups(&s).cl.free_rank,
        };
        TchStatus::Ok
    })
}

/// Nef and ample verdicts for a named divisor.
///
/// # Safety
/// `doc` must be a live handle, `name` a NUL-terminated string, and the
/// out pointers valid.
#[no_mangle]
pub unsafe extern "C" fn tch_divisor_positivity(
    doc: *const TchDocument,
    name: *const c_char,
    nef: *mut bool,
    ample: *mut bool,
) -> TchStatus {
    guard(|| {
        let d = tri!(read_doc(doc));
        let name = tri!(read_str(name));
        if nef.is_null() || ample.is_null() {
            return fail(TchStatus::NullArgument, "null out pointer");
        }
        let s = tri!(setup_of(d));
        let b = lib!(d.doc.divisor(name));
        let sd = lib!(support_function_from_divisor(&s, &b));
        *nef = lib!(is_nef(&s, &sd));
        *ample = lib!(is_ample(&s, &sd));
        TchStatus::Ok
    })
}

/// Cech cohomology dimensions h^0..h^dim of a log differential sheaf.
///
/// `model` is `"tilde"`, `"logd"` or `"w:<r>"`; `divisor` may be null for the
/// trivial twist. `*len` receives the number of entries; if it exceeds `cap`
/// nothing is written to `h` and `BufferTooSmall` is returned.
///
/// # Safety
/// `doc` must be a live handle, strings NUL-terminated, `h` valid for `cap`
/// writes and `len` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tch_cohomology(
    doc: *const TchDocument,
    p: usize,
    model: *const c_char,
    divisor: *const c_char,
    h: *mut usize,
    cap: usize,
    len: *mut usize,
) -> TchStatus {
    guard(|| {
        let d = tri!(read_doc(doc));
        let model = tri!(read_str(model));
        let len = tri!(len.as_mut().ok_or_else(|| fail(TchStatus::NullArgument, "null length pointer")));
        let s = tri!(setup_of(d));
        let model = lib!(torichodge::cli::parse_model(model));
        let twist = if divisor.is_null() {
            vec![int(0); s.fan().num_rays()]
        } else {
            lib!(d.doc.divisor(tri!(read_str(divisor))))
        };
        let sheaf = lib!(LogSheaf::new(&s, p, model, twist));
        let res = lib!(cech_cohomology(&sheaf, None));
        let values = res.up_to(s.source_rank());
        *len = values.len();
        if values.len() > cap {
            return fail(TchStatus::BufferTooSmall, format!("need {} entries", values.len()));
        }
        if h.is_null() {
            return fail(TchStatus::NullArgument, "null output buffer");
        }
        ptr::copy_nonoverlapping(values.as_ptr(), h, values.len());
        TchStatus::Ok
    })
}

unsafe fn jacobian_ring(d: &TchDocument, polynomial: *const c_char) -> Result<GradedJacobianRing, TchStatus> {
    let name = read_str(polynomial)?;
    let s = setup_of(d)?;
    let groups = class_groups(&s);
    let f = d.doc.polynomial(name, &groups).map_err(from_error)?;
    GradedJacobianRing::new(&s, f).map_err(from_error)
}

/// Dimension of the graded Jacobian piece computing h^{n-1-p, p} of the
/// hypersurface given by a named polynomial. Families over an affine base
/// yield `Unsupported`.
///
/// # Safety
/// `doc` must be a live handle, `polynomial` NUL-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn tch_hodge_dimension(
    doc: *const TchDocument,
    polynomial: *const c_char,
    p: usize,
    out: *mut usize,
) -> TchStatus {
    guard(|| {
        let d = tri!(read_doc(doc));
        if out.is_null() {
            return fail(TchStatus::NullArgument, "null out pointer");
        }
        let jr = tri!(jacobian_ring(d, polynomial));
        if jr.setup().target_rank() > 0 {
            return fail(TchStatus::Unsupported, "family over an affine base");
        }
        match lib!(hodge_dim_main(&jr, p, &[])).value {
            HodgeValue::Complete(x) => {
                *out = x;
                TchStatus::Ok
            }
            HodgeValue::Fibers(_) => fail(TchStatus::Unsupported, "family over an affine base"),
        }
    })
}

/// The same dimension computed through Cech cohomology of log forms.
///
/// # Safety
/// As for [`tch_hodge_dimension`].
#[no_mangle]
pub unsafe extern "C" fn tch_hodge_oracle(
    doc: *const TchDocument,
    polynomial: *const c_char,
    p: usize,
    out: *mut usize,
) -> TchStatus {
    guard(|| {
        let d = tri!(read_doc(doc));
        if out.is_null() {
            return fail(TchStatus::NullArgument, "null out pointer");
        }
        let jr = tri!(jacobian_ring(d, polynomial));
        *out = lib!(log_cohomology_oracle(&jr, p));
        TchStatus::Ok
    })
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `cap`). Returns the full message length excluding the NUL,
/// or 0 if there is no error.
///
/// # Safety
/// `buf` must be null or valid for `cap` bytes.
#[no_mangle]
pub unsafe extern "C" fn tch_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn tch_status_name(status: TchStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        TchStatus::Ok => b"ok\0",
        TchStatus::NullArgument => b"null argument\0",
        TchStatus::InvalidUtf8 => b"invalid utf-8\0",
        TchStatus::InvalidInput => b"invalid input\0",
        TchStatus::Precondition => b"precondition failed\0",
        TchStatus::Hypotheses => b"hypotheses not satisfied\0",
        TchStatus::UnstableBox => b"weight box did not stabilize\0",
        TchStatus::BufferTooSmall => b"buffer too small\0",
        TchStatus::Unsupported => b"unsupported\0",
        TchStatus::Panic => b"internal panic\0",
    };
    s.as_ptr() as *const c_char
}
