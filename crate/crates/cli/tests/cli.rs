use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn drum(args: &[&str], report_dir: &std::path::Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_drum"))
        .args(args)
        .env_remove("DRUM_CONTINUOUS_DEMAND")
        .env_remove("DRUM_SEED")
        .env_remove("DRUM_MAX_COLUMNS")
        .env("DRUM_REPORT_DIR", report_dir)
        .output()
        .expect("run drum")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn read_json(path: PathBuf) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn matrix_matches_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = drum(
        &["matrix", fixture("simple2x2.json").to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let golden = std::fs::read_to_string(fixture("table3.txt")).unwrap();
    assert_eq!(stdout(&out), golden);
    let m = read_json(dir.path().join("matrix.json"));
    assert_eq!(m["shape"], serde_json::json!([16, 9]));
}

#[test]
fn inconsistent_dataset_writes_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let out = drum(
        &["test", fixture("table6.json").to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("inconsistent"));
    let cert = read_json(dir.path().join("certificate.json"));
    assert_eq!(cert["certificate"].as_array().unwrap().len(), 16);
    let verdict = read_json(dir.path().join("verdict.json"));
    assert_eq!(verdict["status"], "infeasible");
    assert_eq!(verdict["certificate_verified"], true);
}

#[test]
fn axioms_report_failures() {
    let dir = tempfile::tempdir().unwrap();
    let out = drum(
        &["axioms", fixture("table5.json").to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("stability: pass"));
    assert!(text.contains("monotonicity: fail"));
    let reports = read_json(dir.path().join("axioms.json"));
    assert_eq!(reports.as_array().unwrap().len(), 3);
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ \"goods\": 2, \"budgets\": [").unwrap();
    let out = drum(&["test", bad.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
    let missing = drum(
        &["test", fixture("simple2x2.json").to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(missing.status.code(), Some(2));
    let capped = drum(
        &[
            "--max-columns",
            "4",
            "matrix",
            fixture("simple2x2.json").to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(capped.status.code(), Some(2));
}

#[test]
fn simulated_dataset_round_trips_through_test() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("sim.json");
    let panel = dir.path().join("sim.csv");
    let out = drum(
        &[
            "simulate",
            fixture("simulate_anticorrelated.json").to_str().unwrap(),
            "--output",
            data.to_str().unwrap(),
            "--panel",
            panel.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let verdict = drum(&["test", data.to_str().unwrap()], dir.path());
    assert_eq!(verdict.status.code(), Some(0));
    assert!(stdout(&verdict).starts_with("consistent"));
    assert!(std::fs::read_to_string(&panel)
        .unwrap()
        .starts_with("agent,period,budget"));
}

#[test]
fn random_mixture_is_seeded_and_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let run = |seed: &str| {
        stdout(&drum(
            &[
                "--seed",
                seed,
                "simulate",
                "--random-mixture",
                fixture("simple2x2.json").to_str().unwrap(),
            ],
            dir.path(),
        ))
    };
    let a = run("5");
    assert_eq!(a, run("5"));
    let data = dir.path().join("mix.json");
    std::fs::write(&data, &a).unwrap();
    assert_eq!(
        drum(&["test", data.to_str().unwrap()], dir.path())
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn pooling_detects_inconsistent_cross_section() {
    let dir = tempfile::tempdir().unwrap();
    let out = drum(
        &[
            "pool",
            fixture("pooling_budgets.json").to_str().unwrap(),
            fixture("pooling_panel.csv").to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("not RUM-consistent"));
}

#[test]
fn sarpd_and_slice_run_on_tables() {
    let dir = tempfile::tempdir().unwrap();
    let t5 = fixture("table5.json");
    let sarpd = drum(
        &["sarpd", t5.to_str().unwrap(), "--path", "1,2"],
        dir.path(),
    );
    assert_eq!(sarpd.status.code(), Some(0));
    let slice = drum(
        &[
            "slice",
            fixture("table6.json").to_str().unwrap(),
            "--period",
            "2",
        ],
        dir.path(),
    );
    assert_eq!(slice.status.code(), Some(1));
    assert!(stdout(&slice).contains("not RUM-consistent"));
}
