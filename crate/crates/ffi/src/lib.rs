//! C ABI over `tmkit`.
//!
//! Documents and graphs are opaque handles owned by the caller and released
//! with `tm_document_free` / `tm_graph_free`. Every string handed out must be
//! released with `tm_string_free`. Functions return a `TmStatus`; on failure
//! `tm_last_error` describes the most recent error on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tmkit::render::{render, RenderInput, RenderView};
use tmkit::sim::{simulate, SimLimits, Stimulus};
use tmkit::transform::{
    lift_property_graph, query_neighbors, reduce_dynamic, to_property_graph, Direction, PropertyGraph,
};
use tmkit::{validate_document, Error, ModelDocument};

/// A parsed model.
pub struct TmDocument(ModelDocument);

/// A property graph.
pub struct TmGraph(PropertyGraph);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TmStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Syntax = 3,
    Invalid = 4,
    Simulation = 5,
    Transform = 6,
    InvalidJson = 7,
    Io = 8,
    Panic = 9,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> TmStatus {
    match e {
        Error::Parse(_) => TmStatus::Syntax,
        Error::NotValid(_)
        | Error::NotFullForm
        | Error::EmptyRegion
        | Error::DisconnectedRegion
        | Error::DanglingRef(_)
        | Error::InstanceWithoutCreate => TmStatus::Invalid,
        Error::TickLimit(_) | Error::GuardEval(_) | Error::CapacityUnderflow(_) | Error::BadStimulus(_) => {
            TmStatus::Simulation
        }
        Error::Unreducible(_)
        | Error::EmptyLabel(_)
        | Error::InvalidGraph(_)
        | Error::NoSuchNode(_)
        | Error::InvalidViewInput(_) => TmStatus::Transform,
        Error::Json(_) => TmStatus::InvalidJson,
        Error::Io(_) => TmStatus::Io,
    }
}

fn fail(e: Error) -> TmStatus {
    let s = status_of(&e);
    set_error(format!("{}: {e}", e.code()));
    s
}

/// Runs `f`, turning panics into `TmStatus::Panic`.
fn guarded(f: impl FnOnce() -> TmStatus) -> TmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == TmStatus::Ok {
                LAST_ERROR.with(|e| *e.borrow_mut() = None);
            }
            s
        }
        Err(_) => {
            set_error("internal panic");
            TmStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, TmStatus> {
    if p.is_null() {
        set_error("null argument");
        return Err(TmStatus::NullArgument);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        TmStatus::InvalidUtf8
    })
}

unsafe fn put_string(out: *mut *mut c_char, s: String) {
    let c = CString::new(s.replace('\0', " ")).expect("no interior nul");
    *out = c.into_raw();
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

macro_rules! check_out {
    ($($p:expr),+) => {
        if $($p.is_null())||+ {
            set_error("null argument");
            return TmStatus::NullArgument;
        }
    };
}

/// Message for the last failure on this thread, or null. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn tm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses model text. Succeeds when the text is syntactically correct,
/// even if the model has validation errors; see
/// `tm_document_validate_json`.
///
/// # Safety
/// `src` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tm_document_parse(src: *const c_char, out: *mut *mut TmDocument) -> TmStatus {
    guarded(|| {
        check_out!(out);
        let src = tri!(text(src));
        match tmkit::parse(src) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(TmDocument(p.document)));
                TmStatus::Ok
            }
            Err(e) => fail(Error::Parse(e)),
        }
    })
}

/// # Safety
/// `doc` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tm_document_free(doc: *mut TmDocument) {
    if !doc.is_null() {
        drop(Box::from_raw(doc));
    }
}

/// Writes the validation report as JSON. Returns `Invalid` when it holds
/// errors; the report is written either way.
///
/// # Safety
/// `doc` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tm_document_validate_json(doc: *const TmDocument, out: *mut *mut c_char) -> TmStatus {
    guarded(|| {
        check_out!(doc, out);
        let report = validate_document(&(*doc).0);
        put_string(out, serde_json::to_string(&report).expect("report serializes"));
        if report.ok {
            TmStatus::Ok
        } else {
            set_error(format!("{} validation error(s)", report.errors().count()));
            TmStatus::Invalid
        }
    })
}

/// Writes the canonical model text.
///
/// # Safety
/// `doc` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tm_document_serialize(doc: *const TmDocument, out: *mut *mut c_char) -> TmStatus {
    guarded(|| {
        check_out!(doc, out);
        match tmkit::serialize(&(*doc).0) {
            Ok(s) => {
                put_string(out, s);
                TmStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Simulates the document. `stimuli_json` may be null for no stimuli;
/// `max_ticks` of 0 uses the default limit. The trace is written as JSON;
/// when the tick limit is hit the partial trace is written and
/// `Simulation` returned.
///
/// # Safety
/// `doc` must be a live handle; `stimuli_json` null or a nul-terminated
/// string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tm_simulate_json(
    doc: *const TmDocument,
    stimuli_json: *const c_char,
    max_ticks: u64,
    out: *mut *mut c_char,
) -> TmStatus {
    guarded(|| {
        check_out!(doc, out);
        let stimuli = if stimuli_json.is_null() {
            Vec::new()
        } else {
            match Stimulus::list_from_json(tri!(text(stimuli_json))) {
                Ok(s) => s,
                Err(e) => return fail(Error::BadStimulus(e.to_string())),
            }
        };
        let limits = if max_ticks == 0 {
            SimLimits::default()
        } else {
            SimLimits { max_ticks }
        };
        match simulate(&(*doc).0, &stimuli, limits) {
            Ok(t) => {
                put_string(out, t.to_json());
                TmStatus::Ok
            }
            Err(Error::TickLimit(t)) => {
                put_string(out, t.to_json());
                fail(Error::TickLimit(t))
            }
            Err(e) => fail(e),
        }
    })
}

/// Renders the document as DOT. `view` is one of `static-full`,
/// `static-simplified`, `dynamic`, `behavior`, `property-graph`.
///
/// # Safety
/// `doc` must be a live handle; `view` a nul-terminated string; `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn tm_render(doc: *const TmDocument, view: *const c_char, out: *mut *mut c_char) -> TmStatus {
    guarded(|| {
        check_out!(doc, out);
        let view: RenderView = match tri!(text(view)).parse() {
            Ok(v) => v,
            Err(e) => {
                set_error(e);
                return TmStatus::Transform;
            }
        };
        match render(RenderInput::Document(&(*doc).0), view) {
            Ok(s) => {
                put_string(out, s);
                TmStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Reduces the document's events to a property graph.
///
/// # Safety
/// `doc` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tm_document_to_graph(doc: *const TmDocument, out: *mut *mut TmGraph) -> TmStatus {
    guarded(|| {
        check_out!(doc, out);
        let d = &(*doc).0;
        match to_property_graph(&reduce_dynamic(&d.static_model, &d.events)) {
            Ok(g) => {
                *out = Box::into_raw(Box::new(TmGraph(g)));
                TmStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tm_graph_from_json(json: *const c_char, out: *mut *mut TmGraph) -> TmStatus {
    guarded(|| {
        check_out!(out);
        match PropertyGraph::from_json(tri!(text(json))) {
            Ok(g) => {
                *out = Box::into_raw(Box::new(TmGraph(g)));
                TmStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tm_graph_to_json(g: *const TmGraph, out: *mut *mut c_char) -> TmStatus {
    guarded(|| {
        check_out!(g, out);
        put_string(out, (*g).0.to_json());
        TmStatus::Ok
    })
}

/// # Safety
/// `g` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tm_graph_free(g: *mut TmGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Names of the neighbors of `node` over `rel` edges, as a JSON array.
/// `dir` is `in`, `out` or `both`.
///
/// # Safety
/// `g` must be a live handle; string arguments nul-terminated; `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn tm_graph_query(
    g: *const TmGraph,
    node: *const c_char,
    rel: *const c_char,
    dir: *const c_char,
    out: *mut *mut c_char,
) -> TmStatus {
    guarded(|| {
        check_out!(g, out);
        let (node, rel) = (tri!(text(node)), tri!(text(rel)));
        let dir: Direction = match tri!(text(dir)).parse() {
            Ok(d) => d,
            Err(e) => {
                set_error(e.to_string());
                return TmStatus::Transform;
            }
        };
        match query_neighbors(&(*g).0, node, rel, dir) {
            Ok(names) => {
                put_string(out, serde_json::to_string(&names).expect("names serialize"));
                TmStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Lifts the graph to a model and writes its text.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tm_graph_lift(g: *const TmGraph, out: *mut *mut c_char) -> TmStatus {
    guarded(|| {
        check_out!(g, out);
        match lift_property_graph(&(*g).0).and_then(|l| tmkit::serialize(&l.to_document())) {
            Ok(s) => {
                put_string(out, s);
                TmStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}
