//! C ABI over the rocketbench evaluation pipeline.
//!
//! Every function returns an [`RbStatus`]. On anything other than
//! `RB_STATUS_OK`, [`rb_last_error`] describes what went wrong on the calling
//! thread. Strings handed out by this library are NUL-terminated UTF-8 and
//! must be released with [`rb_string_free`]; handles with their matching
//! `_free` function. Passing NULL to a `_free` function is a no-op.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use rocketbench::catalog::Catalog;
use rocketbench::design::{check_document, parse_agent_output, run_drc, DrcReport};
use rocketbench::harness::{render_task_brief, TaskSpec};
use rocketbench::pipeline::{evaluate_agent_output, evaluate_json, Evaluation};
use rocketbench::sim::Wind;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Io = 4,
    Panic = 5,
}

/// Motor and material tables.
pub struct RbCatalog(Catalog);

/// A challenge, its environment and simulation settings.
pub struct RbTask(TaskSpec);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("NULs removed"));
}

struct Fail(RbStatus, String);

type Res = Result<(), Fail>;

/// Runs `f`, turning errors and panics into a status plus last-error text.
fn guard(f: impl FnOnce() -> Res) -> RbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            RbStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            RbStatus::Panic
        }
    }
}

fn null(name: &str) -> Fail {
    Fail(RbStatus::NullPointer, format!("{name} is NULL"))
}

unsafe fn text<'a>(p: *const c_char, name: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Fail(RbStatus::InvalidUtf8, format!("{name}: {e}")))
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn put<T>(out: *mut T, v: T, name: &str) -> Res {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(v);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Res {
    let c = CString::new(s).map_err(|e| Fail(RbStatus::InvalidArgument, e.to_string()))?;
    put(out, c.into_raw(), "out_json")
}

fn parse_wind(w: &str) -> Result<Wind, Fail> {
    w.parse()
        .map_err(|e: rocketbench::sim::WindParseError| Fail(RbStatus::InvalidArgument, e.to_string()))
}

fn checked(task: TaskSpec) -> Result<TaskSpec, Fail> {
    task.validate().map_err(|e| Fail(RbStatus::InvalidArgument, e))?;
    Ok(task)
}

/// Message for the last failed call on this thread; empty after a success.
/// Owned by the library and valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn rb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, static.
#[no_mangle]
pub extern "C" fn rb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` is NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `out` is a valid pointer to write the handle to.
#[no_mangle]
pub unsafe extern "C" fn rb_catalog_builtin(out: *mut *mut RbCatalog) -> RbStatus {
    guard(|| {
        put(
            out,
            Box::into_raw(Box::new(RbCatalog(Catalog::builtin().clone()))),
            "out",
        )
    })
}

/// Loads `motors.csv` and `materials.csv` from `dir`.
///
/// # Safety
/// `dir` is a NUL-terminated string; `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rb_catalog_from_dir(dir: *const c_char, out: *mut *mut RbCatalog) -> RbStatus {
    guard(|| {
        let dir = text(dir, "dir")?;
        let c = Catalog::from_dir(Path::new(dir)).map_err(|e| Fail(RbStatus::Io, e.to_string()))?;
        put(out, Box::into_raw(Box::new(RbCatalog(c))), "out")
    })
}

/// # Safety
/// `c` is NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rb_catalog_free(c: *mut RbCatalog) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Altitude challenge. `wind` is like `"5@E"`; NULL means calm.
///
/// # Safety
/// `wind` is NULL or NUL-terminated; `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rb_task_altitude(target_apogee: f64, wind: *const c_char, out: *mut *mut RbTask) -> RbStatus {
    guard(|| {
        let wind = if wind.is_null() {
            Wind::CALM
        } else {
            parse_wind(text(wind, "wind")?)?
        };
        let task = checked(TaskSpec::altitude(target_apogee, wind))?;
        put(out, Box::into_raw(Box::new(RbTask(task))), "out")
    })
}

/// Precision-landing challenge; the target is metres east and north of the pad.
///
/// # Safety
/// As [`rb_task_altitude`].
#[no_mangle]
pub unsafe extern "C" fn rb_task_landing(
    target_x: f64,
    target_y: f64,
    wind: *const c_char,
    out: *mut *mut RbTask,
) -> RbStatus {
    guard(|| {
        let wind = if wind.is_null() {
            Wind::CALM
        } else {
            parse_wind(text(wind, "wind")?)?
        };
        let task = checked(TaskSpec::landing(target_x, target_y, wind))?;
        put(out, Box::into_raw(Box::new(RbTask(task))), "out")
    })
}

/// A task as JSON, in the session file's `task` format.
///
/// # Safety
/// `json` is NUL-terminated; `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rb_task_from_json(json: *const c_char, out: *mut *mut RbTask) -> RbStatus {
    guard(|| {
        let task: TaskSpec = serde_json::from_str(text(json, "json")?)
            .map_err(|e| Fail(RbStatus::InvalidArgument, format!("task: {e}")))?;
        put(out, Box::into_raw(Box::new(RbTask(checked(task)?))), "out")
    })
}

/// # Safety
/// `t` is NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rb_task_free(t: *mut RbTask) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// The brief an agent receives for `task`, as markdown.
///
/// # Safety
/// Handles are live; `out_text` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rb_task_brief(
    task: *const RbTask,
    catalog: *const RbCatalog,
    out_text: *mut *mut c_char,
) -> RbStatus {
    guard(|| {
        let (task, catalog) = (deref(task, "task")?, deref(catalog, "catalog")?);
        put_string(out_text, render_task_brief(&task.0, &catalog.0))
    })
}

/// Design rule checks. `design` is a JSON design document or agent text
/// containing a config block. A design that fails the checks is a result,
/// not an error: `*out_passed` is false and the call returns OK.
/// `out_json` may be NULL; otherwise it receives the report as JSON.
///
/// # Safety
/// Pointers are valid; `design` is NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn rb_validate(
    catalog: *const RbCatalog,
    design: *const c_char,
    out_passed: *mut bool,
    out_json: *mut *mut c_char,
) -> RbStatus {
    guard(|| {
        let catalog = &deref(catalog, "catalog")?.0;
        let design = text(design, "design")?;
        let report = if is_json(design) {
            check_document(design, catalog).1
        } else {
            match parse_agent_output(design) {
                Ok(d) => run_drc(&d, catalog),
                Err(e) => DrcReport::from_parse_error(&e),
            }
        };
        put(out_passed, report.passed, "out_passed")?;
        if !out_json.is_null() {
            put_string(out_json, serde_json::to_string(&report).expect("report serializes"))?;
        }
        Ok(())
    })
}

/// Full pipeline. `*out_total` receives the reward total (0 for designs that
/// fail checks or flight). `out_json` may be NULL; otherwise it receives the
/// whole evaluation: design, checks, outcome, stress, cost and reward.
///
/// # Safety
/// Handles are live; `design` is NUL-terminated; outputs are valid.
#[no_mangle]
pub unsafe extern "C" fn rb_evaluate(
    catalog: *const RbCatalog,
    task: *const RbTask,
    design: *const c_char,
    out_total: *mut f64,
    out_json: *mut *mut c_char,
) -> RbStatus {
    guard(|| {
        let catalog = &deref(catalog, "catalog")?.0;
        let task = &deref(task, "task")?.0;
        let design = text(design, "design")?;
        let scenario = task.scenario();
        let eval: Evaluation = if is_json(design) {
            evaluate_json(design, catalog, &scenario)
        } else {
            evaluate_agent_output(design, catalog, &scenario)
        };
        put(out_total, eval.reward.total, "out_total")?;
        if !out_json.is_null() {
            put_string(out_json, serde_json::to_string(&eval).expect("evaluation serializes"))?;
        }
        Ok(())
    })
}

fn is_json(s: &str) -> bool {
    s.trim_start().starts_with('{')
}
