use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_painleve-ds"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("not JSON ({e}): {}", stdout(o)))
}

/// In-process run, for the cheap cases.
fn call(args: &[&str]) -> (i32, String, String) {
    let argv: Vec<String> = std::iter::once("painleve-ds").chain(args.iter().copied()).map(String::from).collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = painleve_ds_cli::run(&argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

const CP6_ALPHAS: &str = "1/6,1/6,1/6,1/6,1/6,1/6";

#[test]
fn heisenberg_prints_scale_and_type() {
    let o = run(&["heisenberg", "--partition", "2,2,1"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("N=4"), "{s}");
    assert!(s.contains("s=(2,0,1,1,0)"), "{s}");
    assert!(!s.contains("FAIL"));
    let o = run(&["heisenberg", "--partition", "3,3", "--json"]);
    let v = json(&o);
    assert_eq!(v["N"], 3);
    assert_eq!(v["s"], serde_json::json!([1, 0, 1, 0, 1, 0]));
    assert_eq!(v["partition"], "(3,3)");
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
    assert!(v["generators"].as_array().unwrap().len() >= 2);
}

#[test]
fn verify_lax_full_run() {
    let o = run(&["verify-lax", "--partition", "3,3", "--samples", "100", "--seed", "7", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["samples"], 100);
    assert_eq!(v["passed"], 100);
    assert_eq!(v["failures"], serde_json::json!([]));
    let o = run(&["verify-lax", "--partition", "3,3", "--samples", "100", "--seed", "7"]);
    assert!(stdout(&o).contains("100/100"));
}

#[test]
fn verify_lax_all_partitions() {
    let (code, out, _) = call(&["verify-lax", "--samples", "5", "--json"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["partitions"].as_array().unwrap().len(), 5);
}

#[test]
fn verify_lax_rejects_unknown_partition() {
    let (code, _, err) = call(&["verify-lax", "--partition", "5"]);
    assert_eq!(code, 2);
    assert!(err.contains("no Lax pair"), "{err}");
}

#[test]
fn integrate_across_singular_time_fails() {
    let o = run(&[
        "integrate", "--system", "cp6", "--point", "0.1,0.2,0.3,0.4", "--t0", "0.5", "--t1", "2", "--alphas", CP6_ALPHAS,
        "--eta", "0",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert!(v["error"].as_str().unwrap().contains("singular time t = 1"), "{v}");
}

#[test]
fn integrate_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("run.csv");
    let o = run(&[
        "integrate", "--partition", "3,3", "--kappas", "0,1/7,-1/8,0,1/10,-1/11", "--rhos", "1/5", "--point",
        "0.3,0.1,0.2,0.15", "--t0", "2", "--t1", "3", "--output", csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("t,q1,p1,q2,p2,w3\n"));
    assert!(text.lines().count() > 3);
    let meta: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("run.json")).unwrap()).unwrap();
    assert_eq!(meta["system"], "cp6");
    assert_eq!(meta["termination"], "reached_end");
    assert_eq!(meta["tolerances"]["rel"], 1e-10);
    assert!(meta["residual"]["max_residual"].as_f64().unwrap() <= 1e-6);
    assert!(meta["params"]["alphas"].is_array());
}

#[test]
fn integrate_csv_grid_on_stdout() {
    let (code, out, err) = call(&[
        "integrate", "--system", "a4", "--alphas", "1/5,1/5,1/5,1/5,1/5", "--point", "0.3,0.1,0.2,0.15", "--t0", "0",
        "--t1", "1", "--grid", "11", "--format", "csv",
    ]);
    assert_eq!(code, 0, "{err}");
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "t,q1,p1,q2,p2");
    assert_eq!(lines.len(), 12);
    assert!(lines[11].starts_with("1e0,"), "{}", lines[11]);
}

#[test]
fn integrate_pole_exits_one_with_witness() {
    let (code, out, _) = call(&[
        "integrate", "--system", "a4", "--alphas", "0,0,1,0,0", "--point", "1,5,1,5", "--t0", "0", "--t1", "10",
    ]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["termination"], "pole_detected");
    assert!(v["message"].is_string());
}

#[test]
fn integrate_residual_threshold_failure_has_witness() {
    let (code, out, _) = call(&[
        "integrate", "--partition", "4,1", "--kappas", "0,1/7,-1/8,0,1/10", "--rhos", "1/5", "--point",
        "0.3,0.1,0.2,0.15", "--t0", "2", "--t1", "2.5", "--residual-tol", "1e-300",
    ]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v["residual"]["max_residual"].as_f64().unwrap() > 0.0);
    assert!(v["residual"]["worst_sample"].is_number());
}

#[test]
fn integrate_usage_errors() {
    assert_eq!(call(&["integrate", "--point", "1,2,3,4", "--t0", "2", "--t1", "3"]).0, 2);
    assert_eq!(call(&["integrate", "--system", "p6", "--alphas", "0,0,0,0,0", "--point", "1,2,3,4", "--t0", "2", "--t1", "3"]).0, 2);
    assert_eq!(call(&["integrate", "--system", "p6", "--partition", "3,3", "--point", "1,2", "--t0", "2", "--t1", "3"]).0, 2);
    assert_eq!(call(&["integrate", "--system", "p6", "--alphas", "0,0,0,0,0", "--point", "1,x", "--t0", "2", "--t1", "3"]).0, 2);
}

#[test]
fn weyl_applies_a_word() {
    let (code, out, err) = call(&[
        "weyl", "--word", "0,1,0", "--point", "1/2,1/3,-2,5", "--t", "3", "--alphas", CP6_ALPHAS, "--eta", "1/5", "--json",
    ]);
    assert_eq!(code, 0, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["word"], "(0,1,0)");
    assert_eq!(v["image"]["t"], "3");
    let (code, out, _) = call(&[
        "weyl", "--word", "0,0", "--point", "1/2,1/3,-2,5", "--t", "3", "--alphas", CP6_ALPHAS, "--eta", "1/5", "--json",
    ]);
    assert_eq!(code, 0);
    let back: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(back["image"]["q"], back["input"]["q"]);
    assert_eq!(back["image"]["p"], back["input"]["p"]);
}

#[test]
fn weyl_pole_and_usage() {
    let (code, out, _) = call(&["weyl", "--word", "0", "--point", "2,1,2,1", "--t", "3", "--alphas", CP6_ALPHAS, "--eta", "0"]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v["error"].as_str().unwrap().contains("q1-q2"), "{v}");
    let floats = ["weyl", "--word", "0", "--point", "0.5,1,2,1", "--t", "3", "--alphas", CP6_ALPHAS, "--eta", "0"];
    assert_eq!(call(&floats).0, 2);
    let short = ["weyl", "--word", "0", "--point", "1,2,1", "--t", "3", "--alphas", CP6_ALPHAS, "--eta", "0"];
    assert_eq!(call(&short).0, 2);
    let letter = ["weyl", "--word", "6", "--point", "1,2,1,1", "--t", "3", "--alphas", CP6_ALPHAS, "--eta", "0"];
    assert_eq!(call(&letter).0, 2);
}

#[test]
fn weyl_check_passes() {
    let (code, out, err) = call(&["weyl-check", "--samples", "10", "--seed", "4"]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out.lines().filter(|l| l.starts_with("pass ")).count(), 3, "{out}");
}

#[test]
fn bad_arguments_exit_two() {
    let o = run(&["bogus"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Usage"));
    let o = run(&["verify-lax", "--samples", "many"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["heisenberg"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn config_file_supplies_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.cfg", "# heisenberg run\ncommand = heisenberg\npartition = 3,1\n");
    let (code, out, _) = call(&["--config", &cfg]);
    assert_eq!(code, 0);
    assert!(out.contains("N=3"), "{out}");
    let (code, out, _) = call(&["--config", &cfg, "heisenberg", "--partition", "4,1"]);
    assert_eq!(code, 0);
    assert!(out.contains("N=8"), "{out}");
    let (code, out, _) = call(&["heisenberg", "--config", &cfg, "--json"]);
    assert_eq!(code, 0);
    assert!(out.contains("\"N\": 3"), "{out}");
}

#[test]
fn config_duplicates_warn() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "dup.cfg", "partition = 2,2\npartition = 3,3\n");
    let (code, out, err) = call(&["--config", &cfg, "heisenberg"]);
    assert_eq!(code, 0);
    assert!(out.contains("partition (3,3)"), "{out}");
    assert!(err.contains("warning") && err.contains("line 2"), "{err}");
}

#[test]
fn config_errors_are_line_numbered() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.cfg", "seed = 1\n# fine\nsamples = lots\n");
    let o = run(&["--config", &cfg, "verify-lax"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
    let (code, _, err) = call(&["--config", "/nonexistent/x.cfg", "heisenberg"]);
    assert_eq!(code, 2);
    assert!(err.contains("x.cfg"));
    let empty = write(dir.path(), "empty.cfg", "");
    let (code, out, _) = call(&["--config", &empty, "weyl-check", "--samples", "2"]);
    assert_eq!(code, 0, "{out}");
}

#[test]
fn config_rationals_are_exact() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "weyl.cfg",
        "command = weyl\nword = 3\npoint = 1/3,2/7,5/11,-3/13\nt = 17/19\nalphas = 1/6,1/6,1/6,1/6,1/6,1/6\neta = 1/10\nformat = json\n",
    );
    let (code, out, err) = call(&["--config", &cfg]);
    assert_eq!(code, 0, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["input"]["alphas"][0], "1/6");
    assert!(v["image"]["q"][0].as_str().unwrap().contains('/'));
}

#[test]
fn json_reports_are_deterministic() {
    let args = ["weyl-check", "--samples", "12", "--seed", "99", "--json"];
    let a = run(&args);
    let b = bin().args(args).env("PAINLEVE_DS_THREADS", "1").output().unwrap();
    assert_eq!(a.stdout, b.stdout);
    let args = ["verify-lax", "--samples", "12", "--seed", "99", "--json"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn report_runs_every_suite() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let (code, out, err) = call(&["report", "--samples", "5", "--seed", "1", "--output", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{out}{err}");
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["zero_curvature"].as_array().unwrap().len(), 5);
    assert_eq!(v["heisenberg"]["reductions"][3]["N"], 4);
    assert!(v["numerics"]["order_slope"].as_f64().is_some());
}
