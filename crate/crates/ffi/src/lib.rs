//! C ABI over the `isovol` library.
//!
//! Graphs are opaque handles created by `isovol_graph_parse` and released
//! with `isovol_graph_free`. Every fallible call returns an `IsovolStatus`;
//! on failure the message is available from `isovol_last_error` on the same
//! thread until the next call. Strings handed out by the library must be
//! released with `isovol_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use isovol::coherent;
use isovol::decider::{self, DecideConfig, Mode};
use isovol::graph_io::{parse_graph, GraphFormat};
use isovol::{AdjacencyMatrix, Error};

/// Opaque graph handle.
pub struct IsovolGraph {
    inner: AdjacencyMatrix,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsovolStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Shape = 4,
    Precondition = 5,
    Inconsistent = 6,
    Refused = 7,
    Unsupported = 8,
    Sampling = 9,
    Io = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsovolMode {
    Auto = 0,
    Exact = 1,
    Randomized = 2,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &Error) -> IsovolStatus {
    match err {
        Error::Parse { .. } => IsovolStatus::Parse,
        Error::Shape(_) => IsovolStatus::Shape,
        Error::Precondition(_) => IsovolStatus::Precondition,
        Error::Inconsistent(_) => IsovolStatus::Inconsistent,
        Error::Refused(_) => IsovolStatus::Refused,
        Error::Unsupported(_) => IsovolStatus::Unsupported,
        Error::Sampling(_) => IsovolStatus::Sampling,
        Error::Io(_) | Error::Json(_) => IsovolStatus::Io,
    }
}

enum Failure {
    Status(IsovolStatus, String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Runs `f`, translating errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> IsovolStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => IsovolStatus::Ok,
        Ok(Err(Failure::Status(status, msg))) => {
            set_error(msg);
            status
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(msg);
            IsovolStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Status(
            IsovolStatus::NullPointer,
            format!("{what} is null"),
        ));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        Failure::Status(
            IsovolStatus::InvalidUtf8,
            format!("{what} is not valid UTF-8"),
        )
    })
}

unsafe fn graph_arg<'a>(g: *const IsovolGraph, what: &str) -> Result<&'a AdjacencyMatrix, Failure> {
    g.as_ref()
        .map(|g| &g.inner)
        .ok_or_else(|| Failure::Status(IsovolStatus::NullPointer, format!("{what} is null")))
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Status(
            IsovolStatus::NullPointer,
            "output pointer is null".into(),
        ));
    }
    let c = CString::new(s)
        .map_err(|_| Failure::Status(IsovolStatus::Panic, "interior nul in output".into()))?;
    *out = c.into_raw();
    Ok(())
}

/// Parses `text` in `format` (`graph6`, `dimacs`, `edgelist` or `dense`)
/// and stores a new handle in `*out`.
///
/// # Safety
/// `text` and `format` must be nul-terminated strings; `out` must be valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn isovol_graph_parse(
    text: *const c_char,
    format: *const c_char,
    out: *mut *mut IsovolGraph,
) -> IsovolStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        let format: GraphFormat = str_arg(format, "format")?.parse()?;
        if out.is_null() {
            return Err(Failure::Status(
                IsovolStatus::NullPointer,
                "output pointer is null".into(),
            ));
        }
        let inner = parse_graph(text, format)?;
        *out = Box::into_raw(Box::new(IsovolGraph { inner }));
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `g` must come from `isovol_graph_parse` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn isovol_graph_free(g: *mut IsovolGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of vertices, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn isovol_graph_order(g: *const IsovolGraph) -> usize {
    g.as_ref().map_or(0, |g| g.inner.n())
}

/// Runs the decision procedure and stores the JSON verdict in `*out_json`.
/// `*similar` is set to 1 for an exact or (epsilon, eta) similar verdict and
/// 0 otherwise; it may be null.
///
/// # Safety
/// `a` and `b` must be live handles; `out_json` must be valid for writes and
/// `similar` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn isovol_decide(
    a: *const IsovolGraph,
    b: *const IsovolGraph,
    epsilon: f64,
    eta: f64,
    seed: u64,
    mode: IsovolMode,
    similar: *mut i32,
    out_json: *mut *mut c_char,
) -> IsovolStatus {
    guard(|| {
        let a = graph_arg(a, "a")?;
        let b = graph_arg(b, "b")?;
        let mode = match mode {
            IsovolMode::Auto => Mode::Auto,
            IsovolMode::Exact => Mode::Exact,
            IsovolMode::Randomized => Mode::Randomized,
        };
        let cfg = DecideConfig::new(epsilon, eta, seed).with_mode(mode);
        let verdict = decider::decide(a, b, &cfg)?;
        put_string(out_json, verdict.to_json()?)?;
        if !similar.is_null() {
            *similar = verdict.outcome.is_similar() as i32;
        }
        Ok(())
    })
}

/// Coherent closure of `g`: stores the basis dump followed by the structure
/// tensor dump in `*out`.
///
/// # Safety
/// `g` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn isovol_refine(
    g: *const IsovolGraph,
    out: *mut *mut c_char,
) -> IsovolStatus {
    guard(|| {
        let g = graph_arg(g, "graph")?;
        let basis = coherent::coherent_closure_of(g)?;
        let tensor = coherent::structure_tensor(&basis)?;
        put_string(out, format!("{}{}", basis.dump(), tensor.dump()))
    })
}

/// Brute-force similarity search for `n <= 12`; `*similar` receives 1 or 0.
///
/// # Safety
/// `a` and `b` must be live handles and `similar` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn isovol_oracle(
    a: *const IsovolGraph,
    b: *const IsovolGraph,
    similar: *mut i32,
) -> IsovolStatus {
    guard(|| {
        let a = graph_arg(a, "a")?;
        let b = graph_arg(b, "b")?;
        if similar.is_null() {
            return Err(Failure::Status(
                IsovolStatus::NullPointer,
                "output pointer is null".into(),
            ));
        }
        *similar = decider::brute_force_similar(a, b)?.is_some() as i32;
        Ok(())
    })
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn isovol_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn isovol_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}
