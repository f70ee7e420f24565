/* Generated by cbindgen from crates/ffi. Do not edit. */

#ifndef INCIDENTDB_H
#define INCIDENTDB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every call.
typedef enum IdbStatus {
  IDB_STATUS_OK = 0,
  // A required pointer argument was null.
  IDB_STATUS_NULL_ARGUMENT = 1,
  // A string argument was not valid UTF-8.
  IDB_STATUS_INVALID_UTF8 = 2,
  // A JSON argument did not parse into the expected document.
  IDB_STATUS_INVALID_JSON = 3,
  IDB_STATUS_NOT_FOUND = 4,
  IDB_STATUS_CONFLICT = 5,
  IDB_STATUS_VALIDATION = 6,
  IDB_STATUS_INVALID_QUERY = 7,
  IDB_STATUS_STORAGE = 8,
  IDB_STATUS_CORRUPT_LOG = 9,
  // The operation is not available for this handle.
  IDB_STATUS_UNSUPPORTED = 10,
  // A bug inside the library; the handle should be closed.
  IDB_STATUS_INTERNAL = 11,
} IdbStatus;

// Opaque database handle.
typedef struct IdbHandle IdbHandle;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *idb_version(void);

// Opens (or creates) the database stored in `data_dir`.
//
// # Safety
// `data_dir` must be a NUL-terminated string; `out_handle` must be writable.
enum IdbStatus idb_open(const char *data_dir, struct IdbHandle **out_handle);

// Opens a database that lives only in memory.
//
// # Safety
// `out_handle` must be writable.
enum IdbStatus idb_open_in_memory(struct IdbHandle **out_handle);

// Releases a handle. Null is ignored.
//
// # Safety
// `handle` must come from `idb_open*` and not be used afterwards.
void idb_close(struct IdbHandle *handle);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from an `out_json` parameter and not be freed twice.
void idb_string_free(char *s);

// Code name of the last failure on this thread (for example
// `"UnknownIncident"`), or null. Valid until the next call on this thread.
const char *idb_last_error_code(void);

// Message of the last failure on this thread, or null. Valid until the
// next call on this thread.
const char *idb_last_error_message(void);

// Runs a search. `query_json` is a query document
// (`{"text", "facetFilters", "page", "pageSize"}`, all optional).
//
// # Safety
// Pointers must be valid; `out_json` receives a string to free.
enum IdbStatus idb_search(const struct IdbHandle *handle, const char *query_json, char **out_json);

// Incident document with reports, classifications and citation.
//
// # Safety
// Pointers must be valid; `out_json` receives a string to free.
enum IdbStatus idb_incident(const struct IdbHandle *handle, uint32_t number, char **out_json);

// Bulk-loads report documents, one JSON object per line.
//
// # Safety
// Pointers must be valid; `out_json` receives a string to free.
enum IdbStatus idb_ingest(const struct IdbHandle *handle, const char *jsonl, char **out_json);

// Queues a draft (same fields as the submit API) for review.
//
// # Safety
// Pointers must be valid; `out_json` receives a string to free.
enum IdbStatus idb_submit(const struct IdbHandle *handle,
                          const char *draft_json,
                          const char *submitter,
                          char **out_json);

// Accepts a pending submission. `resolution` is `"new"` or an incident
// number in decimal. The created report is written to `out_json`.
//
// # Safety
// Pointers must be valid; `out_json` receives a string to free.
enum IdbStatus idb_accept(const struct IdbHandle *handle,
                          uint64_t submission_id,
                          const char *resolution,
                          const char *reviewer,
                          char **out_json);

// Rejects a pending submission with a non-empty reason.
//
// # Safety
// Pointers must be valid.
enum IdbStatus idb_reject(const struct IdbHandle *handle,
                          uint64_t submission_id,
                          const char *reason,
                          const char *reviewer);

// Registers a taxonomy namespace from its JSON definition.
//
// # Safety
// Pointers must be valid.
enum IdbStatus idb_register_namespace(const struct IdbHandle *handle, const char *namespace_json);

// Tags an incident within a namespace.
//
// # Safety
// Pointers must be valid.
enum IdbStatus idb_classify(const struct IdbHandle *handle,
                            uint32_t incident,
                            const char *namespace_,
                            const char *tag,
                            const char *classifier);

// Builds the static views into the handle's data directory and writes the
// manifest to `out_json`. Not available for in-memory handles.
//
// # Safety
// Pointers must be valid; `out_json` receives a string to free.
enum IdbStatus idb_build_views(const struct IdbHandle *handle, size_t top_n, char **out_json);

// Rewrites the log as a snapshot of the current state.
//
// # Safety
// `handle` must be valid.
enum IdbStatus idb_compact(const struct IdbHandle *handle);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* INCIDENTDB_H */
