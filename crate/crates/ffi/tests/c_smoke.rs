//! Compiles the generated header and links a small C program against the static library.

use std::path::PathBuf;
use std::process::Command;

fn manifest() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

// Integration tests run from target/<profile>/deps; cargo leaves the staticlib there
// and sometimes also uplifts it one level.
fn staticlib() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    let deps = exe.parent().unwrap();
    [deps, deps.parent().unwrap()]
        .iter()
        .map(|d| d.join("libflagged_epp_ffi.a"))
        .find(|p| p.exists())
        .unwrap_or_else(|| panic!("libflagged_epp_ffi.a not found near {}", deps.display()))
}

fn cc() -> String {
    std::env::var("CC").unwrap_or_else(|_| "cc".into())
}

#[test]
fn header_lists_the_api() {
    let h = std::fs::read_to_string(manifest().join("include/flagged_epp.h")).unwrap();
    for name in [
        "FLAGGED_EPP_H",
        "typedef struct FepNoiseModel FepNoiseModel;",
        "typedef struct FepFlaggedState FepFlaggedState;",
        "FEP_STATUS_OK = 0",
        "fep_last_error_message",
        "fep_noise_compose",
        "fep_state_step",
        "fep_critical_f0_binary",
        "fep_classify_regime",
    ] {
        assert!(h.contains(name), "header is missing {name}");
    }
}

#[test]
fn c_program_links_and_runs() {
    let lib = staticlib();
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new(cc())
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(manifest().join("include"))
        .arg(manifest().join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let fields: Vec<&str> = text.split_whitespace().collect();
    assert_eq!(fields[0], env!("CARGO_PKG_VERSION"));
    let f: f64 = fields[1].parse().unwrap();
    assert!(f > 0.7 && f < 1.0);
}
