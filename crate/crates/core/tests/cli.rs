//! Golden runs of the `twng` binary: exit codes, artifacts and determinism.

use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn twng(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twng")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn run(cmd: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![cmd, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    twng(&args)
}

fn report(out: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

const SOLVE: &str = r#"{
  "domain": {"shape": "box", "lo": [0, 0], "hi": [1, 1]},
  "params": {"p": 4, "eps": 0.125, "h": 0.03125},
  "boundary": {"kind": "plane", "nu": [1, 0]},
  "tol": 1e-12
}"#;

#[test]
fn minimal_solve_writes_field_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "solve.json", SOLVE);
    let out = dir.path().join("fresh/out");
    let o = run("solve", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rep = report(&out);
    assert_eq!(rep["pass"], true);
    assert!(rep["measurements"]["sup_error_vs_reference"].as_f64().unwrap() <= 1e-9);
    let field = std::fs::read_to_string(out.join("field.csv")).unwrap();
    let rows: Vec<&str> = field.lines().collect();
    assert_eq!(rows[0], "index,x1,x2,region,value");
    // Values equal x₁ at every point.
    for row in &rows[1..] {
        let cols: Vec<&str> = row.split(',').collect();
        let x1: f64 = cols[1].parse().unwrap();
        let v: f64 = cols[4].parse().unwrap();
        assert!((v - x1).abs() <= 1e-9, "{row}");
    }
    let names: Vec<&str> = rep["artifacts"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert_eq!(names, ["field.csv", "stats.csv", "report.json"]);
}

#[test]
fn eps_below_h_exits_two_naming_the_constraint() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.json", &SOLVE.replace("\"eps\": 0.125", "\"eps\": 0.01"));
    let o = run("solve", &cfg, &dir.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("ε") && err.contains('h'), "{err}");
}

#[test]
fn malformed_configs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let typo = write_config(dir.path(), "typo.json", &SOLVE.replace("\"tol\"", "\"tolerance\""));
    let o = run("solve", &typo, &dir.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("tolerance"));

    let o = run("solve", &dir.path().join("missing.json"), &dir.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2));

    let wrong = write_config(dir.path(), "wrong.json", &SOLVE.replacen('{', "{\"command\": \"play\",", 1));
    assert_eq!(run("solve", &wrong, &dir.path().join("out"), &[]).status.code(), Some(2));

    assert_eq!(twng(&["no-such-command", "--config", "x.json"]).status.code(), Some(2));
}

#[test]
fn failed_check_exits_one_and_is_named() {
    let dir = tempfile::tempdir().unwrap();
    // The shipped barrier geometry misses its side condition.
    let cfg = write_config(
        dir.path(),
        "barriers.json",
        r#"{"params": {"p": 4, "eps": 0.05}, "barriers": {"samples": 300, "residual_points": 20}}"#,
    );
    let out = dir.path().join("out");
    let o = run("verify-barriers", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(1));
    let rep = report(&out);
    let failed: Vec<&str> = rep["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false && c["hard"] == true)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["boundary_conditions"]);
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL boundary_conditions"));
}

#[test]
fn repeated_runs_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "play.json",
        r#"{
          "domain": {"shape": "box", "lo": [0, 0], "hi": [1, 1]},
          "params": {"p": 4, "eps": 0.25, "h": 0.0625},
          "boundary": {"kind": "saddle"},
          "trials": 2000,
          "base_seed": 11,
          "play": {"start": [0.5, 0.5], "record": 3}
        }"#,
    );
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(run("play", &cfg, &a, &["--record", "--threads", "1"]).status.code(), Some(0));
    assert_eq!(run("play", &cfg, &b, &["--record", "--threads", "3"]).status.code(), Some(0));
    for f in ["report.json", "field.csv", "stats.csv", "transcripts.csv"] {
        let x = std::fs::read(a.join(f)).unwrap();
        let y = std::fs::read(b.join(f)).unwrap();
        assert!(x == y, "{f} differs between runs");
    }
    let tr = std::fs::read_to_string(a.join("transcripts.csv")).unwrap();
    assert!(tr.starts_with("trial,round,coin,step_bound,point,x1,x2"));
    // A different seed changes the Monte Carlo output.
    let c = dir.path().join("c");
    run("play", &cfg, &c, &["--seed", "12"]);
    assert_ne!(report(&a)["measurements"]["mc_mean"], report(&c)["measurements"]["mc_mean"]);
    assert!(!c.join("transcripts.csv").exists());
}

#[test]
fn appendix_c_run_matches_direct_statistics() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"params": {"p": 4, "eps": 0.05}, "trials": 100000, "base_seed": 5, "linewalk": {"t0": 0.5}}"#,
    );
    let out = dir.path().join("out");
    let o = run("verify-appendixC", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(0));
    let m = &report(&out)["measurements"];
    let direct = twng_core::walks::estimate_line_stats(0.5, 0.05, 100_000, 5).unwrap();
    assert_eq!(m["p_bottom"].as_f64().unwrap(), direct.p_bottom.mean);
    assert_eq!(m["mean_tau"].as_f64().unwrap(), direct.mean_tau.mean);
    assert_eq!(m["second_moment_increment"].as_f64().unwrap(), direct.second_moment_increment.mean);
}

#[test]
fn table_boundary_reproduces_closed_form_data() {
    use twng_core::{DiscreteDomain, DomainSpec};
    let dir = tempfile::tempdir().unwrap();
    let d = DiscreteDomain::build(DomainSpec::unit_square(), 0.0625, 0.25).unwrap();
    let mut csv = String::from("x1,x2,value\n");
    for i in d.strip_points() {
        let x = d.point(i);
        csv.push_str(&format!("{},{},{}\n", x[0], x[1], x[0] * x[0] - x[1] * x[1]));
    }
    std::fs::write(dir.path().join("f.csv"), csv).unwrap();
    let base = r#"{
      "domain": {"shape": "box", "lo": [0, 0], "hi": [1, 1]},
      "params": {"p": 4, "eps": 0.25, "h": 0.0625},
      "boundary": BOUNDARY
    }"#;
    let t = write_config(dir.path(), "t.json", &base.replace("BOUNDARY", r#"{"kind": "table", "path": "f.csv"}"#));
    let s = write_config(dir.path(), "s.json", &base.replace("BOUNDARY", r#"{"kind": "saddle"}"#));
    assert_eq!(run("solve", &t, &dir.path().join("t"), &[]).status.code(), Some(0));
    assert_eq!(run("solve", &s, &dir.path().join("s"), &[]).status.code(), Some(0));
    assert_eq!(
        std::fs::read(dir.path().join("t/field.csv")).unwrap(),
        std::fs::read(dir.path().join("s/field.csv")).unwrap()
    );
    let missing = write_config(dir.path(), "m.json", &base.replace("BOUNDARY", r#"{"kind": "table", "path": "nope.csv"}"#));
    assert_eq!(run("solve", &missing, &dir.path().join("m"), &[]).status.code(), Some(2));
}
