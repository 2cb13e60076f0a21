//! Compiles and runs a small C program against the generated header and the
//! static library, proving the ABI from the consumer side.

use std::path::PathBuf;
use std::process::Command;

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include <math.h>
#include "desal.h"

static const char *CONFIG =
    "{\"plant\": {"
    "\"tdp\": {\"alpha_h\": 0.1, \"eta_h\": 0.1, \"w_min_h\": 0.0, \"w_max_h\": 8333.0,"
    "          \"cost\": {\"a\": 0.05, \"b\": 0.001}},"
    "\"rodp\": {\"alpha_r\": 0.25, \"w_min_r\": 0.0, \"w_max_r\": 8333.0},"
    "\"demand_floor\": 0.0},"
    "\"tariff\": {\"pi_water\": 1.5, \"pi_buy\": 0.4, \"pi_sell\": 0.1}}";

int main(void) {
    DesalCase *plant = NULL;
    DesalThresholds *thresholds = NULL;
    DesalDispatch point;
    char *json = NULL;

    if (desal_case_from_json(CONFIG, &plant) != DESAL_STATUS_OK) {
        fprintf(stderr, "case: %s\n", desal_last_error());
        return 1;
    }
    if (desal_thresholds_compute(plant, &thresholds) != DESAL_STATUS_OK) {
        fprintf(stderr, "thresholds: %s\n", desal_last_error());
        return 1;
    }
    if (desal_thresholds_to_json(thresholds, &json) != DESAL_STATUS_OK) {
        return 1;
    }
    if (desal_optimal_dispatch(plant, thresholds, 0.0, &point) != DESAL_STATUS_OK) {
        return 1;
    }
    if (fabs(point.w_h - 23.75) > 1e-9 || fabs(point.w_r - 59.375) > 1e-9 ||
        point.z != 0.0 || point.zone != DESAL_ZONE_NZ_INTERIOR) {
        fprintf(stderr, "unexpected dispatch: w_h=%f w_r=%f z=%f\n",
                point.w_h, point.w_r, point.z);
        return 1;
    }
    printf("dispatch ok; version %s\n", desal_version());
    desal_string_free(json);
    desal_thresholds_free(thresholds);
    desal_case_free(plant);
    return 0;
}
"#;

#[test]
fn c_consumer_builds_and_runs() {
    // target/debug, derived from this test executable's location.
    let exe = std::env::current_exe().expect("test exe path");
    let target_debug: PathBuf = exe
        .parent() // deps/
        .and_then(|p| p.parent()) // debug/
        .expect("target layout")
        .to_path_buf();
    let include_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let static_lib = target_debug.join("libdesal_ffi.a");
    assert!(
        static_lib.exists(),
        "static library missing at {}",
        static_lib.display()
    );
    assert!(
        include_dir.join("desal.h").exists(),
        "generated header missing in {}",
        include_dir.display()
    );

    let work = tempfile::tempdir().expect("temp dir");
    let source = work.path().join("smoke.c");
    let binary = work.path().join("smoke");
    std::fs::write(&source, C_PROGRAM).expect("write C source");

    let compile = Command::new("cc")
        .arg(&source)
        .arg("-o")
        .arg(&binary)
        .arg("-I")
        .arg(&include_dir)
        .arg("-L")
        .arg(&target_debug)
        .args(["-ldesal_ffi", "-lpthread", "-ldl", "-lm"])
        .output()
        .expect("cc runs");
    assert!(
        compile.status.success(),
        "cc failed:\n{}",
        String::from_utf8_lossy(&compile.stderr)
    );

    let run = Command::new(&binary).output().expect("smoke binary runs");
    assert!(
        run.status.success(),
        "smoke binary failed:\n{}",
        String::from_utf8_lossy(&run.stderr)
    );
}
