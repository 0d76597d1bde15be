//! C ABI.
//!
//! Every entry point returns an [`AlcStatus`]. On failure the message is kept
//! per thread and can be read with [`alc_last_error`]. Strings handed out by
//! the library must be released with [`alc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use alc_engine::classify;
use alc_engine::config::Config;
use alc_engine::parabolic::ParabolicData;
use alc_engine::EngineError;

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidType = 3,
    InvalidRank = 4,
    InvalidNodes = 5,
    Parse = 6,
    DimensionMismatch = 7,
    NotDominant = 8,
    NotIntegral = 9,
    Consistency = 10,
    Singular = 11,
    Rejected = 12,
    Io = 13,
    BufferTooSmall = 14,
    Panic = 15,
}

impl From<&EngineError> for AlcStatus {
    fn from(e: &EngineError) -> Self {
        match e {
            EngineError::InvalidType(_) => AlcStatus::InvalidType,
            EngineError::InvalidRank { .. } => AlcStatus::InvalidRank,
            EngineError::DimensionMismatch { .. } => AlcStatus::DimensionMismatch,
            EngineError::NotDominant(_) => AlcStatus::NotDominant,
            EngineError::NotIntegral(_) => AlcStatus::NotIntegral,
            EngineError::InvalidNodes(_) => AlcStatus::InvalidNodes,
            EngineError::Parse(_) => AlcStatus::Parse,
            EngineError::Consistency(_) => AlcStatus::Consistency,
            EngineError::Singular(_) => AlcStatus::Singular,
            EngineError::Rejected(_) => AlcStatus::Rejected,
            EngineError::Io(_) => AlcStatus::Io,
        }
    }
}

/// A parsed crossed Dynkin diagram.
pub struct AlcDiagram {
    spec: String,
    pd: ParabolicData,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: AlcStatus, msg: impl Into<String>) -> AlcStatus {
    set_error(msg.into());
    status
}

fn engine(e: EngineError) -> AlcStatus {
    let s = AlcStatus::from(&e);
    fail(s, e.to_string())
}

fn guard(f: impl FnOnce() -> AlcStatus) -> AlcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(AlcStatus::Panic, "internal panic"),
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, AlcStatus> {
    if p.is_null() {
        return Err(fail(AlcStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(AlcStatus::InvalidUtf8, "argument is not UTF-8"))
}

fn hand_out(s: String, out: *mut *mut c_char) -> AlcStatus {
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            AlcStatus::Ok
        }
        Err(_) => fail(AlcStatus::Panic, "output contains a nul byte"),
    }
}

/// Message of the last failure on this thread, or null. Owned by the library;
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn alc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parse a diagram such as `"B3:x@3"` or `"A5:x@2,4"`.
///
/// # Safety
/// `spec` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn alc_diagram_new(spec: *const c_char, out: *mut *mut AlcDiagram) -> AlcStatus {
    guard(|| {
        if out.is_null() {
            return fail(AlcStatus::NullPointer, "null output pointer");
        }
        let s = match read_str(spec) {
            Ok(s) => s,
            Err(st) => return st,
        };
        match classify::parabolic_data(s) {
            Ok(pd) => {
                *out = Box::into_raw(Box::new(AlcDiagram { spec: s.to_string(), pd }));
                AlcStatus::Ok
            }
            Err(e) => engine(e),
        }
    })
}

/// # Safety
/// `d` must come from [`alc_diagram_new`] and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn alc_diagram_free(d: *mut AlcDiagram) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Rank of the underlying simple algebra.
///
/// # Safety
/// `d` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn alc_diagram_rank(d: *const AlcDiagram, out: *mut usize) -> AlcStatus {
    guard(|| {
        if d.is_null() || out.is_null() {
            return fail(AlcStatus::NullPointer, "null argument");
        }
        *out = (*d).pd.rank();
        AlcStatus::Ok
    })
}

/// Growth vector. `len` receives the depth; if `cap` is too small nothing is
/// written to `buf` and `BufferTooSmall` is returned.
///
/// # Safety
/// `d` must be a live handle, `buf` valid for `cap` writes, `len` valid.
#[no_mangle]
pub unsafe extern "C" fn alc_diagram_growth(
    d: *const AlcDiagram,
    buf: *mut usize,
    cap: usize,
    len: *mut usize,
) -> AlcStatus {
    guard(|| {
        if d.is_null() || len.is_null() {
            return fail(AlcStatus::NullPointer, "null argument");
        }
        let g = (*d).pd.growth_vector();
        *len = g.len();
        if cap < g.len() {
            return fail(AlcStatus::BufferTooSmall, format!("need {} entries", g.len()));
        }
        if buf.is_null() {
            return fail(AlcStatus::NullPointer, "null buffer");
        }
        ptr::copy_nonoverlapping(g.as_ptr(), buf, g.len());
        AlcStatus::Ok
    })
}

/// Run every candidate B for the diagram and write the JSON record to `out`.
/// `seed` and `sample_box` override the defaults when nonzero.
///
/// # Safety
/// `d` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn alc_diagram_check_json(
    d: *const AlcDiagram,
    seed: u64,
    sample_box: i64,
    out: *mut *mut c_char,
) -> AlcStatus {
    guard(|| {
        if d.is_null() || out.is_null() {
            return fail(AlcStatus::NullPointer, "null argument");
        }
        let mut cfg = Config::default();
        if seed != 0 {
            cfg.seed = seed;
        }
        if sample_box > 0 {
            cfg.sample_box = sample_box;
        }
        match classify::check_diagram(&(*d).spec, &cfg) {
            Ok(rec) => hand_out(serde_json::to_string(&rec).expect("serializable"), out),
            Err(e) => engine(e),
        }
    })
}

/// Number of candidates that pass all checks, written to `out`.
///
/// # Safety
/// `d` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn alc_diagram_passing_count(d: *const AlcDiagram, out: *mut usize) -> AlcStatus {
    guard(|| {
        if d.is_null() || out.is_null() {
            return fail(AlcStatus::NullPointer, "null argument");
        }
        match classify::check_diagram(&(*d).spec, &Config::default()) {
            Ok(rec) => {
                *out = rec.candidates.iter().filter(|c| c.pass).count();
                AlcStatus::Ok
            }
            Err(e) => engine(e),
        }
    })
}

/// # Safety
/// `s` must come from this library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn alc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
