use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_flagged-epp"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn CLI")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn table_verify_reports_all_entries() {
    let o = run(&["table-verify"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "256/256 entries verified");
}

#[test]
fn table_dump_has_256_rows() {
    let o = run(&["table-dump", "--no-timestamp"]);
    let rows = data_rows(&stdout(&o));
    assert_eq!(rows[0], ["s1", "s2", "mu", "nu", "kept", "result"]);
    assert_eq!(rows.len(), 257);
    assert_eq!(rows.iter().filter(|r| r[4] == "1").count(), 128);
}

#[test]
fn iterate_noiseless_werner() {
    let o = run(&["iterate", "--rounds", "3", "--no-timestamp"]);
    assert!(o.status.success());
    let rows = data_rows(&stdout(&o));
    assert_eq!(rows[0][..10], ["round", "A", "B", "C", "D", "F", "F_cond", "N", "R", "eps"]);
    assert_eq!(rows[0][10], "PHIP_00");
    assert_eq!(rows[0].len(), 26);
    let f: f64 = rows[2][5].parse().unwrap();
    assert!((f - 0.735294117647).abs() < 1e-12);
    assert!(rows[2][5].starts_with("7.35294"));
    assert_eq!(rows[2][1], rows[2][5]);
}

#[test]
fn critical_binary_default() {
    let o = run(&["critical-binary", "--no-timestamp"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows = data_rows(&text);
    assert_eq!(rows[0], ["parameter", "method", "value", "tolerance"]);
    let v: f64 = rows[1][2].parse().unwrap();
    assert_eq!(rows[1][1], "spectral_radius_bisection");
    assert!((v - 0.77184).abs() < 1e-4);
}

#[test]
fn config_file_and_byte_identical_reruns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("mc.json");
    std::fs::write(
        &cfg,
        r#"{"initial": {"werner": 0.7},
            "noise": {"composed": [{"one_qubit_white": 0.97}, {"two_qubit_white": 0.97}]},
            "rounds": 6, "ensemble": 20000}"#,
    )
    .unwrap();
    let outs: Vec<Vec<u8>> = (0..2)
        .map(|i| {
            let out = dir.path().join(format!("mc{i}.csv"));
            let o = run(&[
                "montecarlo",
                "--config",
                cfg.to_str().unwrap(),
                "--seed",
                "9",
                "--no-timestamp",
                "--out",
                out.to_str().unwrap(),
            ]);
            assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
            std::fs::read(out).unwrap()
        })
        .collect();
    // The output path is part of the echoed config; compare everything else.
    let strip = |b: &[u8]| {
        String::from_utf8(b.to_vec())
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with("# config"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&outs[0]), strip(&outs[1]));
    let text = String::from_utf8(outs[0].clone()).unwrap();
    assert!(text.contains("# seed: 9"));
    assert!(text.contains("# generator: ChaCha8Rng"));
    assert!(!text.contains("generated_unix"));

    let a = run(&["montecarlo", "--config", cfg.to_str().unwrap(), "--seed", "9", "--no-timestamp"]);
    let b = run(&["montecarlo", "--config", cfg.to_str().unwrap(), "--seed", "9", "--no-timestamp"]);
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["montecarlo", "--config", cfg.to_str().unwrap(), "--seed", "9"]);
    assert!(stdout(&c).contains("# generated_unix: "));
}

#[test]
fn invalid_config_gives_an_error_record() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"noise": {"explicit": [0.5, 0.5, 0.5, 0,0,0,0,0,0,0,0,0,0,0,0,0]}}"#).unwrap();
    let o = run(&["iterate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "config");
    assert_eq!(err["key"], "noise.explicit");
    assert!(o.stdout.is_empty());
}

#[test]
fn unreachable_resource_target_fails_after_writing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("r.json");
    std::fs::write(&cfg, r#"{"noise": {"one_qubit_white": 0.85}, "eps_targets": [0.5, 1e-6]}"#).unwrap();
    let o = run(&["resources", "--config", cfg.to_str().unwrap(), "--no-timestamp"]);
    assert_eq!(o.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "unreachable");
    assert!(stdout(&o).contains("# unreachable: 9.9999999999999995e-7"));
}

#[test]
fn bracket_failure_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("b.json");
    std::fs::write(&cfg, r#"{"bracket": [0.9, 1.0]}"#).unwrap();
    let o = run(&["critical-binary", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "no_sign_change");
}

#[test]
fn fixpoint_binary_map() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("f.json");
    std::fs::write(
        &cfg,
        r#"{"map": "binary", "initial": {"binary": [0.8, 0.2]}, "noise": {"binary": [0.81, 0.09, 0.09, 0.01]}}"#,
    )
    .unwrap();
    let o = run(&["fixpoint", "--config", cfg.to_str().unwrap(), "--no-timestamp"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let rows = data_rows(&text);
    assert_eq!(rows[1][0], "1");
    let a0: f64 = rows[1][6].parse().unwrap();
    let closed = text.lines().find(|l| l.starts_with("# closed_form_A0")).unwrap();
    let closed: f64 = closed.rsplit(' ').next().unwrap().parse().unwrap();
    assert!((a0 - closed).abs() < 1e-10);
    let rho: f64 = rows[1][5].parse().unwrap();
    assert!(rho < 1.0);
}

#[test]
fn shipped_configs_validate() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            let cfg = flagged_epp::cli::ExperimentConfig::load(&path).unwrap();
            cfg.validate().unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            n += 1;
        }
    }
    assert!(n >= 5);
}
