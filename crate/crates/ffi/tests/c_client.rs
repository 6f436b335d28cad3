//! Compiles a small C program against the generated header and the static
//! library, then runs it. Skipped when no C compiler is on PATH.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "rocketbench.h"

int main(int argc, char **argv) {
    FILE *f = fopen(argv[1], "rb");
    if (!f) return 10;
    static char design[1 << 16];
    size_t n = fread(design, 1, sizeof design - 1, f);
    fclose(f);
    design[n] = 0;

    RbCatalog *catalog = NULL;
    RbTask *task = NULL;
    if (rb_catalog_builtin(&catalog) != RB_STATUS_OK) return 11;
    if (rb_task_altitude(3048.0, "5@E", &task) != RB_STATUS_OK) return 12;

    double total = -1.0;
    char *json = NULL;
    if (rb_evaluate(catalog, task, design, &total, &json) != RB_STATUS_OK) return 13;
    if (strstr(json, "\"reward\"") == NULL) return 14;
    rb_string_free(json);

    if (rb_evaluate(NULL, task, design, &total, NULL) != RB_STATUS_NULL_POINTER) return 15;
    if (strlen(rb_last_error()) == 0) return 16;

    printf("%.17g\n", total);
    rb_task_free(task);
    rb_catalog_free(catalog);
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    // tests/… binary lives in target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_scores() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("no C compiler; skipping");
        return;
    }
    let lib = target_dir().join("librocketbench_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; skipping", lib.display());
        return;
    }
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let work = std::env::temp_dir().join(format!("rb-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&work).unwrap();
    let src = work.join("client.c");
    let bin = work.join("client");
    std::fs::write(&src, PROGRAM).unwrap();

    let out = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "cc failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let design = manifest.join("../core/data/example_design.json");
    let run = Command::new(&bin).arg(&design).output().unwrap();
    assert!(run.status.success(), "client exited {:?}", run.status.code());
    let total: f64 = String::from_utf8_lossy(&run.stdout).trim().parse().unwrap();

    let expected = rocketbench::pipeline::evaluate_json(
        &std::fs::read_to_string(&design).unwrap(),
        rocketbench::catalog::Catalog::builtin(),
        &rocketbench::harness::TaskSpec::default().scenario(),
    )
    .reward
    .total;
    assert_eq!(total, expected);
    let _ = std::fs::remove_dir_all(&work);
}
