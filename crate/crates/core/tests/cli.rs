use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use abscompat::format::{read_matrix_file, write_json, write_matrix_file, MatrixJson};
use abscompat::{HermitianMatrix, Tolerance};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_abscompat")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

fn write_real(dir: &Path, name: &str, n: usize, rows: &[f64]) -> String {
    let h = HermitianMatrix::from_real_rows(n, rows).unwrap();
    write_matrix_file(&dir.join(name), h.as_matrix()).unwrap();
    path(dir, name)
}

#[test]
fn gen_then_check_a_compatible_pair() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let g = run(&["gen", "--kind", "compatible-pair", "--n", "3", "--seed", "4", "--out", out]);
    assert!(g.status.success(), "{}", String::from_utf8_lossy(&g.stderr));
    let a = path(dir.path(), "a.json");
    let b = path(dir.path(), "b.json");
    assert_eq!(read_matrix_file(Path::new(&a)).unwrap().n, 6);

    let c = run(&["check", "--a", &a, "--b", &b]);
    assert_eq!(c.status.code(), Some(0));
    let report = json(&c);
    assert_eq!(report["verdict"], Value::Bool(true));
    assert!(report["residual"].as_f64().unwrap() < 1e-10);

    let d = run(&["decompose", "--a", &a, "--b", &b]);
    assert_eq!(d.status.code(), Some(0), "{}", String::from_utf8_lossy(&d.stdout));
    let form = json(&d);
    assert_eq!(form["rank_p"], Value::from(3));
    assert!(form["residuals"]["reconstruction_a"].as_f64().unwrap() < 1e-7);
}

#[test]
fn gen_is_deterministic() {
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&d1, &d2] {
        let out = d.path().to_str().unwrap();
        assert!(run(&["gen", "--kind", "strict-commuting", "--n", "4", "--seed", "42", "--out", out]).status.success());
    }
    for name in ["a.json", "b.json"] {
        let x = std::fs::read(d1.path().join(name)).unwrap();
        let y = std::fs::read(d2.path().join(name)).unwrap();
        assert_eq!(x, y);
    }
}

#[test]
fn check_fails_on_incompatible_pair() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_real(dir.path(), "a.json", 2, &[0.5, 0.0, 0.0, 0.25]);
    let b = write_real(dir.path(), "b.json", 2, &[0.5, 0.5, 0.5, 0.5]);
    let c = run(&["check", "--a", &a, "--b", &b]);
    assert_eq!(c.status.code(), Some(1));
    assert_eq!(json(&c)["verdict"], Value::Bool(false));
}

#[test]
fn decompose_reports_precondition_failures() {
    let dir = tempfile::tempdir().unwrap();
    // compatible (commuting diagonal pair) but not strict
    let a = write_real(dir.path(), "a.json", 2, &[1.0, 0.0, 0.0, 0.3]);
    let b = write_real(dir.path(), "b.json", 2, &[0.2, 0.0, 0.0, 0.0]);
    let d = run(&["decompose", "--a", &a, "--b", &b]);
    assert_eq!(d.status.code(), Some(2));
    let failure = json(&d);
    assert_eq!(failure["status"], "precondition_failed");
    assert_eq!(failure["reason"], "not_strict");

    let f = run(&["decompose", "--a", &a, "--b", &b, "--five-block"]);
    assert_eq!(f.status.code(), Some(0), "{}", String::from_utf8_lossy(&f.stdout));
    let fb = json(&f);
    assert_eq!(fb["p1"]["rank"], Value::from(1));
}

#[test]
fn malformed_input_is_not_a_precondition_failure() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("a.json"), "{\"n\": 2, \"re\": [[1]], \"im\": [[0]]}").unwrap();
    let a = path(dir.path(), "a.json");
    let c = run(&["check", "--a", &a, "--b", &a]);
    assert_eq!(c.status.code(), Some(3));
    assert_eq!(json(&c)["reason"], "format");
}

#[test]
fn construct_writes_a_compatible_pair() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_real(dir.path(), "a.json", 1, &[0.5]);
    let b = write_real(dir.path(), "b.json", 1, &[0.5]);
    let out = dir.path().join("built");
    let c = run(&["construct", "--a", &a, "--b", &b, "--out", out.to_str().unwrap()]);
    assert_eq!(c.status.code(), Some(0));
    let a1 = read_matrix_file(&out.join("a1.json")).unwrap().to_matrix().unwrap();
    let expected = HermitianMatrix::from_real_rows(2, &[0.25, 0.25, 0.25, 0.75]).unwrap();
    assert!(abscompat::op_norm(&(a1 - expected.as_matrix())) < 1e-15);

    let check = run(&[
        "check",
        "--a",
        out.join("a1.json").to_str().unwrap(),
        "--b",
        out.join("b1.json").to_str().unwrap(),
    ]);
    assert_eq!(check.status.code(), Some(0));
}

#[test]
fn characterize_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_real(dir.path(), "a.json", 2, &[0.25, 0.25, 0.25, 0.75]);
    let b = write_real(dir.path(), "b.json", 2, &[0.25, -0.25, -0.25, 0.75]);
    let p = abscompat::ProjectionMatrix::new(HermitianMatrix::diag(&[0.0, 1.0]), &Tolerance::default()).unwrap();
    let p1 = dir.path().join("p1.json");
    write_json(&p1, &MatrixJson::from_projection(&p)).unwrap();
    let c = run(&["characterize", "--a", &a, "--b", &b, "--p1", p1.to_str().unwrap()]);
    assert_eq!(c.status.code(), Some(0));
    assert_eq!(json(&c)["certified"], Value::Bool(true));

    let flipped = write_real(dir.path(), "f.json", 2, &[0.25, 0.25, 0.25, 0.75]);
    let c = run(&["characterize", "--a", &a, "--b", &flipped, "--p1", p1.to_str().unwrap()]);
    assert_eq!(c.status.code(), Some(1));
    assert!((json(&c)["residual_i"].as_f64().unwrap() - 0.5).abs() < 1e-15);
}

#[test]
fn halmos_on_generated_projections() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let g = run(&["gen", "--kind", "generic-projections", "--n", "4", "--seed", "1", "--out", out]);
    assert!(g.status.success());
    let h = run(&["halmos", "--p", &path(dir.path(), "p.json"), "--q", &path(dir.path(), "q.json")]);
    assert_eq!(h.status.code(), Some(0));
    let form = json(&h);
    assert_eq!(form["rank"], Value::from(2));
    assert!(form["residuals"]["pythagoras"].as_f64().unwrap() < 1e-12);

    let same = run(&["halmos", "--p", &path(dir.path(), "p.json"), "--q", &path(dir.path(), "p.json")]);
    assert_eq!(same.status.code(), Some(2));
    assert_eq!(json(&same)["reason"], "not_generic");
}

#[test]
fn suite_writes_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let s = run(&["suite", "--trials", "2", "--max-n", "3", "--seed", "9", "--json", report.to_str().unwrap()]);
    assert_eq!(s.status.code(), Some(0));
    let parsed: abscompat::harness::SuiteReport =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(parsed.passed);
    assert_eq!(parsed.trials, 2);
}

#[test]
fn numbers_use_seventeen_significant_digits() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    run(&["gen", "--kind", "strict", "--n", "2", "--seed", "0", "--out", out]);
    let text = std::fs::read_to_string(dir.path().join("a.json")).unwrap();
    let first = text.split("\"re\":[[").nth(1).unwrap().split(',').next().unwrap();
    let mantissa = first.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
    assert_eq!(mantissa.len(), 17, "{first}");
}
