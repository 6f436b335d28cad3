use std::ffi::{c_char, CStr, CString};
use std::ptr;

use rocketbench::design::{EXAMPLE_DESIGN_JSON, EXAMPLE_DESIGN_PY};
use rocketbench::harness::TaskSpec;
use rocketbench::pipeline::evaluate_json;
use rocketbench_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(rb_last_error()) }.to_str().unwrap().to_string()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    rb_string_free(s);
    out
}

struct Handles {
    catalog: *mut RbCatalog,
    task: *mut RbTask,
}

impl Handles {
    fn new() -> Handles {
        let mut catalog = ptr::null_mut();
        let mut task = ptr::null_mut();
        let wind = CString::new("5@E").unwrap();
        unsafe {
            assert_eq!(rb_catalog_builtin(&mut catalog), RbStatus::Ok);
            assert_eq!(rb_task_altitude(3048.0, wind.as_ptr(), &mut task), RbStatus::Ok);
        }
        Handles { catalog, task }
    }
}

impl Drop for Handles {
    fn drop(&mut self) {
        unsafe {
            rb_task_free(self.task);
            rb_catalog_free(self.catalog);
        }
    }
}

#[test]
fn evaluate_matches_library() {
    let h = Handles::new();
    let design = CString::new(EXAMPLE_DESIGN_JSON).unwrap();
    let mut total = f64::NAN;
    let mut json = ptr::null_mut();
    let status = unsafe { rb_evaluate(h.catalog, h.task, design.as_ptr(), &mut total, &mut json) };
    assert_eq!(status, RbStatus::Ok, "{}", last_error());
    let direct = evaluate_json(
        EXAMPLE_DESIGN_JSON,
        rocketbench::catalog::Catalog::builtin(),
        &TaskSpec::default().scenario(),
    );
    assert_eq!(total.to_bits(), direct.reward.total.to_bits());
    let v: serde_json::Value = serde_json::from_str(&unsafe { take(json) }).unwrap();
    assert_eq!(v["reward"]["total"].as_f64().unwrap().to_bits(), total.to_bits());
    assert!(last_error().is_empty());
}

#[test]
fn agent_text_and_null_json_out() {
    let h = Handles::new();
    let design = CString::new(EXAMPLE_DESIGN_PY).unwrap();
    let mut total = 0.0;
    let status = unsafe { rb_evaluate(h.catalog, h.task, design.as_ptr(), &mut total, ptr::null_mut()) };
    assert_eq!(status, RbStatus::Ok);
    assert!(total > 0.0);
}

#[test]
fn validate_reports_failures_as_results() {
    let h = Handles::new();
    let mut v: serde_json::Value = serde_json::from_str(EXAMPLE_DESIGN_JSON).unwrap();
    let r = v["aerodynamics"]["tail"]["top_radius"].clone();
    v["aerodynamics"]["tail"]["bottom_radius"] = r;
    let bad = CString::new(v.to_string()).unwrap();
    let mut passed = true;
    let mut json = ptr::null_mut();
    let status = unsafe { rb_validate(h.catalog, bad.as_ptr(), &mut passed, &mut json) };
    assert_eq!(status, RbStatus::Ok);
    assert!(!passed);
    assert!(unsafe { take(json) }.contains("tail_radii"));

    let good = CString::new(EXAMPLE_DESIGN_JSON).unwrap();
    let status = unsafe { rb_validate(h.catalog, good.as_ptr(), &mut passed, ptr::null_mut()) };
    assert_eq!(status, RbStatus::Ok);
    assert!(passed);
}

#[test]
fn error_codes() {
    let h = Handles::new();
    let mut total = 0.0;
    let design = CString::new("{}").unwrap();
    unsafe {
        assert_eq!(
            rb_evaluate(ptr::null(), h.task, design.as_ptr(), &mut total, ptr::null_mut()),
            RbStatus::NullPointer
        );
        assert!(last_error().contains("catalog"));
        assert_eq!(
            rb_evaluate(h.catalog, h.task, ptr::null(), &mut total, ptr::null_mut()),
            RbStatus::NullPointer
        );
        assert_eq!(
            rb_evaluate(h.catalog, h.task, design.as_ptr(), ptr::null_mut(), ptr::null_mut()),
            RbStatus::NullPointer
        );

        let invalid = [0xffu8, 0xfe, 0];
        assert_eq!(
            rb_evaluate(h.catalog, h.task, invalid.as_ptr().cast(), &mut total, ptr::null_mut()),
            RbStatus::InvalidUtf8
        );

        let mut task = ptr::null_mut();
        let wind = CString::new("strong@nowhere").unwrap();
        assert_eq!(
            rb_task_altitude(3048.0, wind.as_ptr(), &mut task),
            RbStatus::InvalidArgument
        );
        assert!(task.is_null());
        assert_eq!(rb_task_landing(1.0, 2.0, ptr::null(), &mut task), RbStatus::Ok);
        rb_task_free(task);

        let json = CString::new("{\"challenge\": 1}").unwrap();
        let mut t2 = ptr::null_mut();
        assert_eq!(rb_task_from_json(json.as_ptr(), &mut t2), RbStatus::InvalidArgument);

        let dir = CString::new("/definitely/not/here").unwrap();
        let mut c = ptr::null_mut();
        assert_eq!(rb_catalog_from_dir(dir.as_ptr(), &mut c), RbStatus::Io);
        assert!(!last_error().is_empty());

        // Frees accept NULL.
        rb_string_free(ptr::null_mut());
        rb_task_free(ptr::null_mut());
        rb_catalog_free(ptr::null_mut());
    }
}

#[test]
fn task_json_round_trip_and_brief() {
    let h = Handles::new();
    let json =
        CString::new(serde_json::to_string(&TaskSpec::landing(100.0, 200.0, "3@N".parse().unwrap())).unwrap()).unwrap();
    let mut task = ptr::null_mut();
    unsafe {
        assert_eq!(rb_task_from_json(json.as_ptr(), &mut task), RbStatus::Ok);
        let mut text = ptr::null_mut();
        assert_eq!(rb_task_brief(task, h.catalog, &mut text), RbStatus::Ok);
        let brief = take(text);
        assert!(brief.contains("x = 100.0 m (East), y = 200.0 m (North)"));
        rb_task_free(task);
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(rb_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/rocketbench.h");
    for name in [
        "rb_last_error",
        "rb_version",
        "rb_string_free",
        "rb_catalog_builtin",
        "rb_catalog_from_dir",
        "rb_catalog_free",
        "rb_task_altitude",
        "rb_task_landing",
        "rb_task_from_json",
        "rb_task_free",
        "rb_task_brief",
        "rb_validate",
        "rb_evaluate",
        "RB_STATUS_NULL_POINTER",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
