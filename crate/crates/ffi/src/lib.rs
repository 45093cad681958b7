//! C ABI over the priorepair engine.
//!
//! Handles are opaque and owned by the caller until passed to the matching
//! `*_free` function. Every fallible function returns a [`PrStatus`]; on
//! failure the message is available from [`pr_last_error`] on the same
//! thread. Strings returned through out-parameters are released with
//! [`pr_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use priorepair::asp::emit_priority;
use priorepair::engine::{Engine, KnowledgeBase, Sources};
use priorepair::kb::Constant;
use priorepair::priority::{Priority, Strategy};
use priorepair::semantics::{RepairKind, Semantics};
use priorepair::Error;

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrStatus {
    Ok = 0,
    ParseError = 1,
    ValidationError = 2,
    UnknownQuery = 3,
    InvalidArgument = 4,
    CapExceeded = 5,
    IoError = 6,
    NullPointer = 7,
    InvalidUtf8 = 8,
    Panic = 9,
}

/// A parsed knowledge base with its conflicts.
pub struct PrKb {
    engine: Engine,
}

/// A resolved priority relation.
pub struct PrPriority {
    priority: Priority,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> PrStatus {
    match e.root() {
        Error::Parse(_) => PrStatus::ParseError,
        Error::Validation(_) => PrStatus::ValidationError,
        Error::UnknownQuery(_) => PrStatus::UnknownQuery,
        Error::InvalidArgument(_) => PrStatus::InvalidArgument,
        Error::CapExceeded { .. } => PrStatus::CapExceeded,
        Error::Io { .. } | Error::InFile { .. } => PrStatus::IoError,
    }
}

struct Fail(PrStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        Fail(status_of(&e), e.to_string())
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PrStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PrStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PrStatus::Panic
        }
    }
}

/// Reads an optional C string; null reads as empty.
unsafe fn opt_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Ok("");
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(PrStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn req_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(PrStatus::NullPointer, format!("{what} is null")));
    }
    opt_str(p, what)
}

unsafe fn req_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail(PrStatus::NullPointer, format!("{what} is null")))
}

fn out_ptr<T>(p: *mut T, what: &str) -> Result<(), Fail> {
    if p.is_null() {
        Err(Fail(PrStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no interior nul").into_raw()
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn pr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn pr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a knowledge base from source texts; any text may be null.
///
/// # Safety
/// Non-null text pointers must be nul-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pr_kb_new(
    dataset: *const c_char,
    meta: *const c_char,
    constraints: *const c_char,
    queries: *const c_char,
    rules: *const c_char,
    taxonomy: *const c_char,
    out: *mut *mut PrKb,
) -> PrStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let src = Sources {
            dataset: opt_str(dataset, "dataset")?,
            meta: opt_str(meta, "meta")?,
            constraints: opt_str(constraints, "constraints")?,
            queries: opt_str(queries, "queries")?,
            rules: opt_str(rules, "rules")?,
            taxonomy: opt_str(taxonomy, "taxonomy")?,
        };
        let kb = KnowledgeBase::parse(&src)?;
        *out = Box::into_raw(Box::new(PrKb { engine: Engine::new(kb) }));
        Ok(())
    })
}

/// Releases a knowledge base; null is ignored.
///
/// # Safety
/// `kb` must come from `pr_kb_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pr_kb_free(kb: *mut PrKb) {
    if !kb.is_null() {
        drop(Box::from_raw(kb));
    }
}

/// Number of facts and of minimal conflicts.
///
/// # Safety
/// `kb` must be a live handle; the out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn pr_kb_sizes(kb: *const PrKb, facts: *mut usize, conflicts: *mut usize) -> PrStatus {
    guard(|| {
        let kb = req_ref(kb, "kb")?;
        out_ptr(facts, "facts")?;
        out_ptr(conflicts, "conflicts")?;
        *facts = kb.engine.kb().dataset.len();
        *conflicts = kb.engine.conflicts().len();
        Ok(())
    })
}

/// Minimal conflicts as a JSON array of sorted id arrays.
///
/// # Safety
/// `kb` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pr_conflicts_json(kb: *const PrKb, out: *mut *mut c_char) -> PrStatus {
    guard(|| {
        let kb = req_ref(kb, "kb")?;
        out_ptr(out, "out")?;
        let d = &kb.engine.kb().dataset;
        let mut sets: Vec<Vec<_>> = kb
            .engine
            .conflicts()
            .sets()
            .iter()
            .map(|c| {
                let mut ids: Vec<_> = c.iter().map(|&f| d.id(f).clone()).collect();
                ids.sort();
                ids
            })
            .collect();
        sets.sort();
        let json: Vec<Vec<String>> = sets.into_iter().map(|s| s.iter().map(|i| i.to_string()).collect()).collect();
        *out = to_c_string(serde_json::to_string(&json).expect("serializes"));
        Ok(())
    })
}

/// Resolves the priority with strategy `u`, `d`, `ru` or `g`.
///
/// # Safety
/// `kb` must be a live handle, `strategy` nul-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pr_priority_new(
    kb: *const PrKb,
    strategy: *const c_char,
    out: *mut *mut PrPriority,
) -> PrStatus {
    guard(|| {
        let kb = req_ref(kb, "kb")?;
        out_ptr(out, "out")?;
        let s: Strategy = req_str(strategy, "strategy")?.parse()?;
        *out = Box::into_raw(Box::new(PrPriority { priority: kb.engine.priority(s) }));
        Ok(())
    })
}

/// Releases a priority; null is ignored.
///
/// # Safety
/// `p` must come from `pr_priority_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pr_priority_free(p: *mut PrPriority) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of pairs in a priority.
///
/// # Safety
/// `p` must be a live handle; `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pr_priority_len(p: *const PrPriority, len: *mut usize) -> PrStatus {
    guard(|| {
        let p = req_ref(p, "priority")?;
        out_ptr(len, "len")?;
        *len = p.priority.len();
        Ok(())
    })
}

/// Whether the answer `tuple` (of `arity` constants) to `query` is entailed
/// under repair kind `S`/`P`/`C` and semantics `brave`/`AR`/`IAR`.
///
/// # Safety
/// Handles must be live; `tuple` must hold `arity` nul-terminated strings
/// (it may be null when `arity` is 0); `entailed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pr_decide(
    kb: *const PrKb,
    priority: *const PrPriority,
    query: *const c_char,
    repair: *const c_char,
    semantics: *const c_char,
    tuple: *const *const c_char,
    arity: usize,
    entailed: *mut bool,
) -> PrStatus {
    guard(|| {
        let kb = req_ref(kb, "kb")?;
        let p = req_ref(priority, "priority")?;
        out_ptr(entailed, "entailed")?;
        let q = kb.engine.kb().query(req_str(query, "query")?)?;
        let kind: RepairKind = req_str(repair, "repair")?.parse()?;
        let sem: Semantics = req_str(semantics, "semantics")?.parse()?;
        if arity > 0 && tuple.is_null() {
            return Err(Fail(PrStatus::NullPointer, "tuple is null".into()));
        }
        if arity != q.answer.len() {
            return Err(Fail(
                PrStatus::InvalidArgument,
                format!("query {} has arity {}, got {arity}", q.name, q.answer.len()),
            ));
        }
        let mut t = Vec::with_capacity(arity);
        for i in 0..arity {
            let s = req_str(*tuple.add(i), "tuple element")?;
            t.push(Constant::classify(s).ok_or_else(|| Fail(PrStatus::InvalidArgument, format!("bad constant `{s}`")))?);
        }
        let causes = kb.engine.causes(q, false);
        let sets = causes.get(&t).cloned().unwrap_or_default();
        let decider = priorepair::semantics::Decider::new(kb.engine.conflicts(), &p.priority);
        *entailed = decider.decide(sem, kind, &sets);
        Ok(())
    })
}

/// Verdicts for every candidate answer of `query` as a JSON array of
/// `{"tuple": [...], "entailed": bool}` objects sorted by tuple.
///
/// # Safety
/// Handles must be live; strings nul-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pr_answers_json(
    kb: *const PrKb,
    priority: *const PrPriority,
    query: *const c_char,
    repair: *const c_char,
    semantics: *const c_char,
    out: *mut *mut c_char,
) -> PrStatus {
    guard(|| {
        let kb = req_ref(kb, "kb")?;
        let p = req_ref(priority, "priority")?;
        out_ptr(out, "out")?;
        let q = kb.engine.kb().query(req_str(query, "query")?)?;
        let kind: RepairKind = req_str(repair, "repair")?.parse()?;
        let sem: Semantics = req_str(semantics, "semantics")?.parse()?;
        let verdicts: Vec<serde_json::Value> = kb
            .engine
            .verdicts(q, &p.priority, &[(sem, kind)], false)
            .into_iter()
            .map(|v| {
                serde_json::json!({
                    "tuple": v.tuple.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                    "entailed": v.entailed,
                })
            })
            .collect();
        *out = to_c_string(serde_json::to_string(&verdicts).expect("serializes"));
        Ok(())
    })
}

/// The logic program computing the priority for a strategy.
///
/// # Safety
/// `strategy` must be nul-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pr_emit_priority(strategy: *const c_char, out: *mut *mut c_char) -> PrStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let s: Strategy = req_str(strategy, "strategy")?.parse()?;
        *out = to_c_string(emit_priority(s).to_string());
        Ok(())
    })
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
