use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_concentro"));
    c.env_remove("CONCENTRO_WORKERS");
    c
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn fixture(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn setup() -> TempDir {
    let dir = TempDir::new().unwrap();
    fixture(&dir, "id2.json", r#"{"order":2,"dim":2,"values":[1,0,0,1]}"#);
    fixture(&dir, "x1x2.json", r#"{"nvars":2,"terms":[{"exps":[[1,1],[2,1]],"coef":1}]}"#);
    fixture(&dir, "sq.json", r#"{"nvars":1,"terms":[{"exps":[[1,2]],"coef":1}]}"#);
    dir
}

fn total_row(csv: &str) -> f64 {
    let line = csv.lines().find(|l| l.starts_with(",total,")).expect("total row");
    line.rsplit(',').next().unwrap().parse().unwrap()
}

#[test]
fn norm_of_identity() {
    let dir = setup();
    let o = run(dir.path(), &["norm", "--tensor", "id2.json", "--partition", "1|2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().next().unwrap().parse::<f64>().unwrap(), 1.0);
    assert!(out.contains("method=spectral"));
}

#[test]
fn norm_certificate_file() {
    let dir = setup();
    let o = run(dir.path(), &["norm", "--tensor", "id2.json", "--partition", "1,2", "--cert", "cert.json"]);
    assert!(o.status.success());
    let body: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("cert.json")).unwrap()).unwrap();
    assert!((body["value"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-12);
    assert!(stdout(&o).contains("certificate=cert.json"));
}

#[test]
fn gaussian_bound_total() {
    let dir = setup();
    let o = run(dir.path(), &["bounds", "--poly", "x1x2.json", "--law", "gaussian", "--p", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("# concentro "));
    assert!(out.contains("d,partition,exponent,norm,flag,term"));
    assert!((total_row(&out) - 4.0).abs() < 1e-9);
}

#[test]
fn missing_file_names_path() {
    let dir = setup();
    let o = run(dir.path(), &["norm", "--tensor", "absent.json", "--partition", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("absent.json"), "{err}");
    assert_eq!(err.trim_end().lines().count(), 1);
}

#[test]
fn validation_errors_exit_two() {
    let dir = setup();
    let o = run(dir.path(), &["bounds", "--poly", "x1x2.json", "--law", "bernoulli", "--p", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--pp"));
    let o = run(dir.path(), &["norm", "--tensor", "id2.json", "--partition", "1|2|3"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(dir.path(), &["mc", "moments", "--poly", "x1x2.json", "--N", "100", "--p", "8"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_flag_prints_usage() {
    let dir = setup();
    let o = run(dir.path(), &["norm", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Usage"));
}

#[test]
fn config_file_and_override() {
    let dir = setup();
    fixture(&dir, "cfg.json", r#"{"command":"bounds","poly":"x1x2.json","law":"gaussian","p":2}"#);
    let o = run(dir.path(), &["--config", "cfg.json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!((total_row(&stdout(&o)) - 4.0).abs() < 1e-9);
    let o = run(dir.path(), &["--config", "cfg.json", "--p", "4"]);
    assert!((total_row(&stdout(&o)) - (4.0 + 8f64.sqrt())).abs() < 1e-9);
    fixture(&dir, "part.json", r#"{"tensor":"id2.json","partition":[[1],[2]]}"#);
    let o = run(dir.path(), &["norm", "--config", "part.json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().next().unwrap(), "1");
}

#[test]
fn reports_are_reproducible_across_workers() {
    let dir = setup();
    let args = ["mc", "moments", "--poly", "x1x2.json", "--N", "20000", "--p", "2,4", "--seed", "7", "--batch", "1000"];
    let a = run(dir.path(), &args);
    let b = bin().current_dir(dir.path()).args(args).env("CONCENTRO_WORKERS", "3").output().unwrap();
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("# seed=7"));
}

#[test]
fn out_file_written() {
    let dir = setup();
    let o = run(dir.path(), &["mc", "tail", "--poly", "x1x2.json", "--N", "2000", "--t", "0,1", "--out", "tail.csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("tail.csv")).unwrap();
    let first = text.lines().find(|l| l.starts_with("0,")).unwrap();
    assert!(first.starts_with("0,1,"));
}

#[test]
fn graph_and_rmt_commands() {
    let dir = setup();
    let o = run(dir.path(), &["graphs", "cyclebound", "--k", "4", "--n", "50", "--p", "0.3", "--d", "2", "--partition", "1|2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("sequence_sum,per_copy,shape"));
    fixture(&dir, "k3.json", r#"{"k":3,"edges":[[1,2],[2,3],[1,3]]}"#);
    let o = run(
        dir.path(),
        &["graphs", "cyclebound", "--graph", "k3.json", "--n", "10", "--p", "0.5", "--d", "3", "--partition", "1,2,3"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let o = run(dir.path(), &["graphs", "triangles", "--n", "12", "--p", "0.5", "--N", "1000", "--eps", "0.5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = run(dir.path(), &["rmt", "--f", "sq.json", "--n", "10", "--replicas", "50", "--t", "1.5", "--CL", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("# semicircle_term=4"));
}

#[test]
fn hermite_coefficients() {
    let dir = setup();
    let o = run(dir.path(), &["hermite", "--k", "3"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows, vec!["power,coef", "0,0", "1,-3", "2,0", "3,1"]);
    let o = run(dir.path(), &["hermite", "--poly", "sq.json"]);
    let out = stdout(&o);
    assert!(out.contains("\n0,1\n") && out.contains("\n2,1\n"), "{out}");
}
