//! Builds a small C program against the generated header and the static
//! library, then runs it.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "continet.h"

int main(void) {
    ContinetConfig *cfg = NULL;
    ContinetInputs *inputs = NULL;
    ContinetPlan *plan = NULL;
    ContinetTotals totals;
    if (continet_config_parse("ants = 100\niterations = 20\nseed = 3\n", &cfg) != CONTINET_STATUS_OK) return 10;
    if (continet_inputs_load(cfg, &inputs) != CONTINET_STATUS_OK) return 11;
    if (continet_plan_run(cfg, inputs, &plan) != CONTINET_STATUS_OK) return 12;
    if (continet_plan_totals(plan, &totals) != CONTINET_STATUS_OK) return 13;
    printf("clusters=%zu jobs=%zu\n", (size_t)totals.clusters, (size_t)totals.jobs);

    ContinetConfig *bad = NULL;
    if (continet_config_parse("bogus = 1", &bad) != CONTINET_STATUS_VALIDATION) return 14;
    if (strstr(continet_last_error(), "bogus") == NULL) return 15;

    char *csv = NULL;
    if (continet_plan_csv(plan, CONTINET_TABLE_COSTS, &csv) != CONTINET_STATUS_OK) return 16;
    if (strncmp(csv, "cluster,countries,cost", 22) != 0) return 17;
    continet_string_free(csv);

    continet_plan_free(plan);
    continet_inputs_free(inputs);
    continet_config_free(cfg);
    return 0;
}
"#;

/// `target/<profile>`, found from the test executable in `<profile>/deps`.
fn profile_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    let crate_dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header_dir = crate_dir.join("include");
    assert!(header_dir.join("continet.h").is_file(), "header was not generated");

    let lib = profile_dir().join("libcontinet_ffi.a");
    if Command::new("cc").arg("--version").output().is_err() || !lib.is_file() {
        eprintln!("skipping: no C compiler or static library at {}", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let bin = dir.path().join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&header_dir)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "cc failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "smoke program exited with {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "clusters=5 jobs=61");
}
