#ifndef ROCKETBENCH_H
#define ROCKETBENCH_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RbStatus {
  RB_STATUS_OK = 0,
  RB_STATUS_NULL_POINTER = 1,
  RB_STATUS_INVALID_UTF8 = 2,
  RB_STATUS_INVALID_ARGUMENT = 3,
  RB_STATUS_IO = 4,
  RB_STATUS_PANIC = 5,
} RbStatus;

// Motor and material tables.
typedef struct RbCatalog RbCatalog;

// A challenge, its environment and simulation settings.
typedef struct RbTask RbTask;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// Owned by the library and valid until the next call on this thread.
const char *rb_last_error(void);

// Library version, static.
const char *rb_version(void);

// # Safety
// `s` is NULL or a string returned by this library, not yet freed.
void rb_string_free(char *s);

// # Safety
// `out` is a valid pointer to write the handle to.
enum RbStatus rb_catalog_builtin(struct RbCatalog **out);

// Loads `motors.csv` and `materials.csv` from `dir`.
//
// # Safety
// `dir` is a NUL-terminated string; `out` is valid for writes.
enum RbStatus rb_catalog_from_dir(const char *dir, struct RbCatalog **out);

// # Safety
// `c` is NULL or a handle from this library, not yet freed.
void rb_catalog_free(struct RbCatalog *c);

// Altitude challenge. `wind` is like `"5@E"`; NULL means calm.
//
// # Safety
// `wind` is NULL or NUL-terminated; `out` is valid for writes.
enum RbStatus rb_task_altitude(double target_apogee, const char *wind, struct RbTask **out);

// Precision-landing challenge; the target is metres east and north of the pad.
//
// # Safety
// As [`rb_task_altitude`].
enum RbStatus rb_task_landing(double target_x,
                              double target_y,
                              const char *wind,
                              struct RbTask **out);

// A task as JSON, in the session file's `task` format.
//
// # Safety
// `json` is NUL-terminated; `out` is valid for writes.
enum RbStatus rb_task_from_json(const char *json, struct RbTask **out);

// # Safety
// `t` is NULL or a handle from this library, not yet freed.
void rb_task_free(struct RbTask *t);

// The brief an agent receives for `task`, as markdown.
//
// # Safety
// Handles are live; `out_text` is valid for writes.
enum RbStatus rb_task_brief(const struct RbTask *task,
                            const struct RbCatalog *catalog,
                            char **out_text);

// Design rule checks. `design` is a JSON design document or agent text
// containing a config block. A design that fails the checks is a result,
// not an error: `*out_passed` is false and the call returns OK.
// `out_json` may be NULL; otherwise it receives the report as JSON.
//
// # Safety
// Pointers are valid; `design` is NUL-terminated.
enum RbStatus rb_validate(const struct RbCatalog *catalog,
                          const char *design,
                          bool *out_passed,
                          char **out_json);

// Full pipeline. `*out_total` receives the reward total (0 for designs that
// fail checks or flight). `out_json` may be NULL; otherwise it receives the
// whole evaluation: design, checks, outcome, stress, cost and reward.
//
// # Safety
// Handles are live; `design` is NUL-terminated; outputs are valid.
enum RbStatus rb_evaluate(const struct RbCatalog *catalog,
                          const struct RbTask *task,
                          const char *design,
                          double *out_total,
                          char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ROCKETBENCH_H */
