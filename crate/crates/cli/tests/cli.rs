use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use orthoising::embedding::OrthogonalEmbedding;
use orthoising::hamiltonian::LatticeHamiltonian;
use orthoising::pulse::PulseSchedule;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orthoising")).args(args).output().expect("binary runs")
}

fn run_paths(cmd: &str, graph: &Path, rest: &[&str]) -> Output {
    let mut args = vec![cmd, graph.to_str().unwrap()];
    args.extend_from_slice(rest);
    run(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn validate_exit_codes() {
    let ok = run_paths("validate", &data("k4.txt"), &[]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("\"is_cubic\": true"));

    let bad = run_paths("validate", &data("degree2.txt"), &[]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stderr(&bad).contains("DegreeNotThree: vertex 1 has degree 2"));

    let missing = run_paths("validate", &data("no-such-graph.txt"), &[]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(stderr(&missing).contains("cannot read"));
}

#[test]
fn malformed_graph_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.txt");
    fs::write(&p, "4 6\n0 1\n0 x\n").unwrap();
    let o = run_paths("validate", &p, &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn oracle_witnesses() {
    assert_eq!(stdout(&run_paths("oracle", &data("k4.txt"), &[])).trim(), "1: {0}");
    assert_eq!(stdout(&run_paths("oracle", &data("p2.txt"), &[])).trim(), "1: {0}");
    let q3 = stdout(&run_paths("oracle", &data("cube.txt"), &[]));
    assert!(q3.starts_with("4: {"), "{}", q3);
    let limited = run_paths("oracle", &data("cube.txt"), &["--oracle-limit", "6"]);
    assert_eq!(limited.status.code(), Some(4));
}

#[test]
fn compile_writes_round_tripping_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k4");
    let o = run_paths("compile", &data("k4.txt"), &["--c", "9", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in ["embedding.json", "hamiltonian.json", "schedule.json", "report.json", "manifest.json"] {
        assert!(out.join(f).is_file(), "{} missing", f);
    }

    let emb_text = fs::read_to_string(out.join("embedding.json")).unwrap();
    assert_eq!(OrthogonalEmbedding::from_json(&emb_text).unwrap().to_json(), emb_text);
    let h_text = fs::read_to_string(out.join("hamiltonian.json")).unwrap();
    let h = LatticeHamiltonian::from_json(&h_text).unwrap();
    assert_eq!(h.to_json(), h_text);
    assert_eq!(h.c, 9);
    let s_text = fs::read_to_string(out.join("schedule.json")).unwrap();
    assert_eq!(PulseSchedule::from_json(&s_text).unwrap().to_json(), s_text);

    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["oracle"]["cardinality"], 1);
    assert_eq!(report["schedule"]["overhead_matches_claim"], false);
    let names: Vec<&str> = report["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"correspondence-first-excited"));
    assert!(names.contains(&"schedule"));

    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    let entries = manifest["artifacts"].as_array().unwrap();
    assert_eq!(entries.len(), 4);
    for e in entries {
        let bytes = fs::read(out.join(e["file"].as_str().unwrap())).unwrap();
        assert_eq!(e["bytes"], bytes.len());
        assert_eq!(e["sha256"].as_str().unwrap().len(), 64);
    }
}

#[test]
fn compile_embedding_failures_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let k33 = run_paths("compile", &data("k33.txt"), &["--out", out]);
    assert_eq!(k33.status.code(), Some(3));
    assert!(stderr(&k33).contains("NonPlanar"));
    let tight = run_paths("compile", &data("k4.txt"), &["--budget", "1x1", "--out", out]);
    assert_eq!(tight.status.code(), Some(3));
    assert!(stderr(&tight).contains("BudgetExceeded"));
    let bad_budget = run_paths("compile", &data("k4.txt"), &["--budget", "wide", "--out", out]);
    assert_eq!(bad_budget.status.code(), Some(1));
}

#[test]
fn compile_rejects_non_cubic_input() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_paths("compile", &data("degree2.txt"), &["--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn compile_larger_instances() {
    let dir = tempfile::tempdir().unwrap();
    for g in ["cube.txt", "prism3.txt"] {
        let out = dir.path().join(g);
        let o = run_paths("compile", &data(g), &["--c", "3", "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}: {}", g, stdout(&o));
    }
}

#[test]
fn verify_schedule_accepts_and_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k4");
    assert!(run_paths("compile", &data("k4.txt"), &["--out", out.to_str().unwrap()]).status.success());
    let s = out.join("schedule.json");
    let h = out.join("hamiltonian.json");
    let ok = run(&["verify-schedule", s.to_str().unwrap(), h.to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&ok)).unwrap();
    assert_eq!(report["step_count"], 16);

    // A schedule for a different c no longer matches.
    let other = dir.path().join("k4c3");
    assert!(run_paths("compile", &data("k4.txt"), &["--c", "3", "--out", other.to_str().unwrap()]).status.success());
    let wrong = run(&["verify-schedule", other.join("schedule.json").to_str().unwrap(), h.to_str().unwrap()]);
    assert_eq!(wrong.status.code(), Some(1));

    let garbage = dir.path().join("garbage.json");
    fs::write(&garbage, "{").unwrap();
    assert_eq!(run(&["verify-schedule", garbage.to_str().unwrap(), h.to_str().unwrap()]).status.code(), Some(1));
    let missing = dir.path().join("missing.json");
    assert_eq!(run(&["verify-schedule", missing.to_str().unwrap(), h.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn solve_k4_recovers_the_maximum_set() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = run_paths(
        "solve",
        &data("k4.txt"),
        &["--T", "100", "--seed", "1", "--gap-points", "3", "--dump-amplitudes", "--out", out.to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("run.json")).unwrap()).unwrap();
    assert_eq!(report["recovered_mis_size"], 1);
    assert_eq!(report["recovered_matches_oracle"], true);
    assert!(report["success"]["probability"].as_f64().unwrap() > 0.5);
    assert_eq!(report["gap_scan"].as_array().unwrap().len(), 3);
    assert_eq!(report["config"]["steps"], 1000);
    let amps = fs::read(out.join("amplitudes.bin")).unwrap();
    assert_eq!(amps.len(), 16 << 9);
    let norm: f64 = amps.chunks(8).map(|b| f64::from_le_bytes(b.try_into().unwrap()).powi(2)).sum();
    assert!((norm - 1.0).abs() < 1e-9);
}

#[test]
fn solve_limits() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let big = run_paths("solve", &data("cube.txt"), &["--out", out]);
    assert_eq!(big.status.code(), Some(4));
    let bad_dt = run_paths("solve", &data("k4.txt"), &["--T", "1", "--dt=-0.5", "--out", out]);
    assert_eq!(bad_dt.status.code(), Some(1));
    assert!(stderr(&bad_dt).contains("invalid run configuration"), "{}", stderr(&bad_dt));
    let usage = run(&["solve", "--shots", "many", data("k4.txt").to_str().unwrap()]);
    assert_eq!(usage.status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
