//! C ABI over the incident database.
//!
//! Handles are opaque. Every call returns an [`IdbStatus`]; on failure the
//! error code and message are kept per thread and can be read with
//! [`idb_last_error_code`] and [`idb_last_error_message`]. Structured data
//! crosses the boundary as UTF-8 JSON using the same documents as the HTTP
//! API. Strings returned through `out_json` are owned by the caller and
//! must be released with [`idb_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use incidentdb::db::{parse_ingest, Database};
use incidentdb::index::Query;
use incidentdb::model::{IncidentNumber, Resolution, SubmissionId, TaxonomyNamespace};
use incidentdb::submission::DraftInput;
use incidentdb::{views, Error};

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdbStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// A JSON argument did not parse into the expected document.
    InvalidJson = 3,
    NotFound = 4,
    Conflict = 5,
    Validation = 6,
    InvalidQuery = 7,
    Storage = 8,
    CorruptLog = 9,
    /// The operation is not available for this handle.
    Unsupported = 10,
    /// A bug inside the library; the handle should be closed.
    Internal = 11,
}

/// Opaque database handle.
pub struct IdbHandle {
    db: Database,
    data_dir: Option<PathBuf>,
}

struct Failure {
    status: IdbStatus,
    code: &'static str,
    message: String,
}

impl Failure {
    fn new(status: IdbStatus, code: &'static str, message: impl Into<String>) -> Self {
        Failure {
            status,
            code,
            message: message.into(),
        }
    }
}

fn status_of(err: &Error) -> IdbStatus {
    match err {
        Error::UnknownReport(_)
        | Error::UnknownIncident(_)
        | Error::UnknownNamespace(_)
        | Error::UnknownTag { .. }
        | Error::UnknownClassification { .. }
        | Error::UnknownSubmission(_)
        | Error::UnknownView(_) => IdbStatus::NotFound,
        Error::DuplicateReport(_)
        | Error::DuplicateUrl(_)
        | Error::WouldOrphanIncident { .. }
        | Error::DuplicateNamespace(_)
        | Error::DuplicateClassification { .. }
        | Error::AlreadyDecided(_) => IdbStatus::Conflict,
        Error::InvalidName { .. } | Error::Validation(_) => IdbStatus::Validation,
        Error::InvalidQuery(_) => IdbStatus::InvalidQuery,
        Error::CorruptLog { .. } => IdbStatus::CorruptLog,
        Error::Storage(_) => IdbStatus::Storage,
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure::new(status_of(&err), err.code(), err.to_string())
    }
}

struct LastError {
    code: CString,
    message: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<LastError>> = const { RefCell::new(None) };
}

fn c_string(s: &str) -> CString {
    CString::new(s.replace('\0', "\u{FFFD}")).expect("interior nuls replaced")
}

fn record(failure: &Failure) {
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = Some(LastError {
            code: c_string(failure.code),
            message: c_string(&failure.message),
        });
    });
}

fn run(f: impl FnOnce() -> Result<(), Failure>) -> IdbStatus {
    LAST_ERROR.with(|slot| slot.borrow_mut().take());
    let failure = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => return IdbStatus::Ok,
        Ok(Err(failure)) => failure,
        Err(panic) => {
            let message = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            Failure::new(IdbStatus::Internal, "Internal", message)
        }
    };
    record(&failure);
    failure.status
}

unsafe fn arg_str<'a>(name: &str, p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::new(IdbStatus::NullArgument, "NullArgument", format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure::new(IdbStatus::InvalidUtf8, "InvalidUtf8", format!("{name}: {e}")))
}

unsafe fn borrow<'a>(h: *const IdbHandle) -> Result<&'a IdbHandle, Failure> {
    h.as_ref()
        .ok_or_else(|| Failure::new(IdbStatus::NullArgument, "NullArgument", "handle is null"))
}

fn parse_json<T: serde::de::DeserializeOwned>(name: &str, text: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::new(IdbStatus::InvalidJson, "InvalidJson", format!("{name}: {e}")))
}

unsafe fn emit<T: serde::Serialize>(out: *mut *mut c_char, value: &T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::new(IdbStatus::NullArgument, "NullArgument", "out_json is null"));
    }
    let text = serde_json::to_string(value).map_err(|e| Failure::new(IdbStatus::Internal, "Internal", e.to_string()))?;
    *out = c_string(&text).into_raw();
    Ok(())
}

unsafe fn emit_handle(out: *mut *mut IdbHandle, h: IdbHandle) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::new(IdbStatus::NullArgument, "NullArgument", "out_handle is null"));
    }
    *out = Box::into_raw(Box::new(h));
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn idb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Opens (or creates) the database stored in `data_dir`.
///
/// # Safety
/// `data_dir` must be a NUL-terminated string; `out_handle` must be writable.
#[no_mangle]
pub unsafe extern "C" fn idb_open(data_dir: *const c_char, out_handle: *mut *mut IdbHandle) -> IdbStatus {
    run(|| {
        let dir = PathBuf::from(arg_str("data_dir", data_dir)?);
        let db = Database::open(&dir)?;
        emit_handle(out_handle, IdbHandle { db, data_dir: Some(dir) })
    })
}

/// Opens a database that lives only in memory.
///
/// # Safety
/// `out_handle` must be writable.
#[no_mangle]
pub unsafe extern "C" fn idb_open_in_memory(out_handle: *mut *mut IdbHandle) -> IdbStatus {
    run(|| {
        emit_handle(
            out_handle,
            IdbHandle {
                db: Database::in_memory(),
                data_dir: None,
            },
        )
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `handle` must come from `idb_open*` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn idb_close(handle: *mut IdbHandle) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from an `out_json` parameter and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn idb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Code name of the last failure on this thread (for example
/// `"UnknownIncident"`), or null. Valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn idb_last_error_code() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |e| e.code.as_ptr()))
}

/// Message of the last failure on this thread, or null. Valid until the
/// next call on this thread.
#[no_mangle]
pub extern "C" fn idb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |e| e.message.as_ptr()))
}

/// Runs a search. `query_json` is a query document
/// (`{"text", "facetFilters", "page", "pageSize"}`, all optional).
///
/// # Safety
/// Pointers must be valid; `out_json` receives a string to free.
#[no_mangle]
pub unsafe extern "C" fn idb_search(
    handle: *const IdbHandle,
    query_json: *const c_char,
    out_json: *mut *mut c_char,
) -> IdbStatus {
    run(|| {
        let h = borrow(handle)?;
        let query: Query = parse_json("query_json", arg_str("query_json", query_json)?)?;
        query.validate()?;
        emit(out_json, &h.db.search(&query)?)
    })
}

/// Incident document with reports, classifications and citation.
///
/// # Safety
/// Pointers must be valid; `out_json` receives a string to free.
#[no_mangle]
pub unsafe extern "C" fn idb_incident(handle: *const IdbHandle, number: u32, out_json: *mut *mut c_char) -> IdbStatus {
    run(|| {
        let h = borrow(handle)?;
        emit(out_json, &h.db.incident_document(IncidentNumber(number))?)
    })
}

/// Bulk-loads report documents, one JSON object per line.
///
/// # Safety
/// Pointers must be valid; `out_json` receives a string to free.
#[no_mangle]
pub unsafe extern "C" fn idb_ingest(handle: *const IdbHandle, jsonl: *const c_char, out_json: *mut *mut c_char) -> IdbStatus {
    run(|| {
        let h = borrow(handle)?;
        let text = arg_str("jsonl", jsonl)?;
        let at_line = |f: incidentdb::db::IngestFailure| {
            let message = f.to_string();
            Failure { message, ..Failure::from(f.error) }
        };
        let records = parse_ingest(text).map_err(at_line)?;
        let summary = h.db.ingest(records).map_err(at_line)?;
        emit(out_json, &summary)
    })
}

/// Queues a draft (same fields as the submit API) for review.
///
/// # Safety
/// Pointers must be valid; `out_json` receives a string to free.
#[no_mangle]
pub unsafe extern "C" fn idb_submit(
    handle: *const IdbHandle,
    draft_json: *const c_char,
    submitter: *const c_char,
    out_json: *mut *mut c_char,
) -> IdbStatus {
    run(|| {
        let h = borrow(handle)?;
        let draft: DraftInput = parse_json("draft_json", arg_str("draft_json", draft_json)?)?;
        let submission = h.db.submit(draft, arg_str("submitter", submitter)?)?;
        emit(out_json, &submission)
    })
}

/// Accepts a pending submission. `resolution` is `"new"` or an incident
/// number in decimal. The created report is written to `out_json`.
///
/// # Safety
/// Pointers must be valid; `out_json` receives a string to free.
#[no_mangle]
pub unsafe extern "C" fn idb_accept(
    handle: *const IdbHandle,
    submission_id: u64,
    resolution: *const c_char,
    reviewer: *const c_char,
    out_json: *mut *mut c_char,
) -> IdbStatus {
    run(|| {
        let h = borrow(handle)?;
        let resolution: Resolution = arg_str("resolution", resolution)?
            .parse()
            .map_err(|e: String| Failure::from(Error::validation("resolution", &e)))?;
        let report = h
            .db
            .accept(SubmissionId(submission_id), resolution, arg_str("reviewer", reviewer)?)?;
        emit(out_json, &*report)
    })
}

/// Rejects a pending submission with a non-empty reason.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn idb_reject(
    handle: *const IdbHandle,
    submission_id: u64,
    reason: *const c_char,
    reviewer: *const c_char,
) -> IdbStatus {
    run(|| {
        let h = borrow(handle)?;
        h.db.reject(
            SubmissionId(submission_id),
            arg_str("reason", reason)?,
            arg_str("reviewer", reviewer)?,
        )?;
        Ok(())
    })
}

/// Registers a taxonomy namespace from its JSON definition.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn idb_register_namespace(handle: *const IdbHandle, namespace_json: *const c_char) -> IdbStatus {
    run(|| {
        let h = borrow(handle)?;
        let ns: TaxonomyNamespace = parse_json("namespace_json", arg_str("namespace_json", namespace_json)?)?;
        h.db.register_namespace(ns)?;
        Ok(())
    })
}

/// Tags an incident within a namespace.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn idb_classify(
    handle: *const IdbHandle,
    incident: u32,
    namespace: *const c_char,
    tag: *const c_char,
    classifier: *const c_char,
) -> IdbStatus {
    run(|| {
        let h = borrow(handle)?;
        h.db.classify(
            IncidentNumber(incident),
            arg_str("namespace", namespace)?,
            arg_str("tag", tag)?,
            arg_str("classifier", classifier)?,
        )?;
        Ok(())
    })
}

/// Builds the static views into the handle's data directory and writes the
/// manifest to `out_json`. Not available for in-memory handles.
///
/// # Safety
/// Pointers must be valid; `out_json` receives a string to free.
#[no_mangle]
pub unsafe extern "C" fn idb_build_views(handle: *const IdbHandle, top_n: usize, out_json: *mut *mut c_char) -> IdbStatus {
    run(|| {
        let h = borrow(handle)?;
        let dir = h
            .data_dir
            .as_ref()
            .ok_or_else(|| Failure::new(IdbStatus::Unsupported, "Unsupported", "in-memory handles have no views directory"))?;
        emit(out_json, &views::build_all(&h.db, dir, top_n)?)
    })
}

/// Rewrites the log as a snapshot of the current state.
///
/// # Safety
/// `handle` must be valid.
#[no_mangle]
pub unsafe extern "C" fn idb_compact(handle: *const IdbHandle) -> IdbStatus {
    run(|| {
        borrow(handle)?.db.compact()?;
        Ok(())
    })
}
