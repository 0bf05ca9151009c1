use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loopbracket"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(stdout(o).trim()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

const DIAGONAL: &str = r#"{"group": {"kind": "GL_R", "n": 2},
  "images": {"a1": [[2, 0], [0, 0.5]], "b1": [[3, 0], [0, 0.3333333333333333]]}}"#;

#[test]
fn bracket_examples() {
    let o = run(&["bracket", "--gamma", "a1", "--lambda", "b1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "[{\"coef\":\"1\",\"word\":\"a1 b1\"}]\n");

    let o = run(&["bracket", "--gamma", "a1", "--lambda", "a1"]);
    assert_eq!(stdout(&o), "[]\n");

    let o = run(&["bracket", "--gamma", "a1", "--lambda", "b1", "--unoriented"]);
    let terms = json(&o);
    let terms = terms.as_array().unwrap();
    assert_eq!(terms.len(), 2);
    assert!(terms.iter().all(|t| t["coef"] == "1/2" || t["coef"] == "-1/2"));
}

#[test]
fn bracket_from_input_file() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "s.json", r#"{"genus": 2, "curves": {"x": "a1 a2", "y": "b1", "z": "B2"}}"#);
    let o = run(&["bracket", &input]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "[{\"coef\":\"1\",\"word\":\"a1 b1 a2\"}]\n");
    let o = run(&["bracket", &input, "--gamma", "z", "--lambda", "x"]);
    assert!(o.status.success());
    assert_eq!(json(&o).as_array().unwrap().len(), 1);
}

#[test]
fn bad_input_exits_2() {
    let dir = TempDir::new().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"genus": 1, "curves": {"x": "a2"}}"#);
    assert_eq!(run(&["bracket", &bad]).status.code(), Some(2));
    let garbled = write(dir.path(), "g.json", "{not json");
    assert_eq!(run(&["bracket", &garbled]).status.code(), Some(2));
    assert_eq!(run(&["holonomy", &garbled]).status.code(), Some(2));
    assert_eq!(run(&["bracket", "/nonexistent/file.json"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["sample-rep", "--group", "Sp_R:3"]).status.code(), Some(2));
}

#[test]
fn holonomy_examples() {
    let dir = TempDir::new().unwrap();
    let rep = write(dir.path(), "rep.json", DIAGONAL);
    let o = run(&["holonomy", &rep, "--word", "a1 b1"]);
    assert!(o.status.success());
    let v = json(&o);
    assert!((v["trace"].as_f64().unwrap() - 6.1666667).abs() < 1e-7);

    let o = run(&["holonomy", &rep]);
    let v = json(&o);
    assert_eq!(v["trace"].as_f64().unwrap(), 2.0);
    assert_eq!(v["holonomy"], serde_json::json!([[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]));

    let theta = write(dir.path(), "theta.json", r#"{"a1": [[0.05, 0.1], [0, -0.05]], "b1": [[0, 0], [0.1, 0]]}"#);
    let o = run(&["holonomy", &rep, "--word", "a1 b1 A1", "--perturbation", &theta]);
    assert!(o.status.success());
    let p = &json(&o)["perturbed"];
    assert!(p["remainder_bound"].as_f64().unwrap() <= 1e-9);
    assert!(p["rk4_delta"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn relator_violation_exits_4() {
    let dir = TempDir::new().unwrap();
    let rep = write(
        dir.path(),
        "rep.json",
        r#"{"group": {"kind": "GL_R", "n": 2}, "images": {"a1": [[1, 1], [0, 1]], "b1": [[1, 0], [1, 1]]}}"#,
    );
    assert_eq!(run(&["holonomy", &rep, "--word", "a1"]).status.code(), Some(4));
}

#[test]
fn sampled_representation_feeds_holonomy() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("rep.json");
    let o = run(&["sample-rep", "--genus", "2", "--group", "U_pq:2", "--seed", "5", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).is_empty());
    let o = run(&["holonomy", out.to_str().unwrap(), "--word", "a1 b2 A2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(json(&o)["relator_residual"].as_f64().unwrap() <= 1e-9);
}

fn summary(o: &Output) -> Value {
    let text = stdout(o);
    serde_json::from_str(text.lines().last().unwrap()).unwrap()
}

#[test]
fn verify_examples() {
    let o = run(&["verify", "variation", "--seed", "1", "--trials", "50"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 51);
    let s = summary(&o);
    let worst = s["worst"].as_array().unwrap();
    let fd = worst.iter().find(|c| c["name"] == "gradient_fd").unwrap();
    assert!(fd["value"].as_f64().unwrap() <= 1e-5);

    let o = run(&["verify", "chen", "--trials", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let nil = summary(&o)["worst"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "nilpotent_exact")
        .unwrap()
        .clone();
    assert!(nil["value"].as_f64().unwrap() <= 1e-15);

    let o = run(&["verify", "goldman-gl", "--genus", "1", "--trials", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let h = &summary(&o)["worst"][0];
    assert_eq!(h["name"], "homomorphism");
    assert!(h["value"].as_f64().unwrap() <= 1e-8);

    let o = run(&["verify", "dgla", "--trials", "3", "--tol=-1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn output_is_deterministic_and_independent_of_parallelism() {
    let dir = TempDir::new().unwrap();
    for suite in ["goldman-unoriented", "jacobi", "perturbed"] {
        let args = ["verify", suite, "--seed", "7", "--trials", "6"];
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.stdout, b.stdout);
        let mut parallel = args.to_vec();
        parallel.extend(["--parallel", "4"]);
        assert_eq!(run(&parallel).stdout, a.stdout);
        let out = dir.path().join(format!("{suite}.jsonl"));
        let mut to_file = args.to_vec();
        to_file.extend(["--out", out.to_str().unwrap()]);
        assert!(run(&to_file).status.success());
        assert_eq!(fs::read(&out).unwrap(), a.stdout);
    }
}

#[test]
fn dgla_check_detects_corruption() {
    let o = run(&["dgla-check"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!((v["d0"].as_u64(), v["d1"].as_u64()), (Some(2), Some(2)));

    let o = run(&["dgla-check", "--twist", "--group", "GL_R:2", "--seed", "1", "--emit"]);
    let mut instance = json(&o);
    let d0 = instance["d0"].as_u64().unwrap() as usize;
    let entry = &mut instance["bracket"][0][d0 + 1][d0 + 2];
    *entry = Value::from(entry.as_f64().unwrap() + 0.5);
    let dir = TempDir::new().unwrap();
    let path = write(dir.path(), "bad.json", &instance.to_string());
    let o = run(&["dgla-check", &path]);
    assert_eq!(o.status.code(), Some(1));
    assert!(json(&o)["residuals"]["leibniz"].as_f64().unwrap() > 0.0);

    let wrong = write(dir.path(), "shape.json", r#"{"d0":1,"d1":0,"differential":[[0]],"bracket":[],"pairing":[[1]]}"#);
    assert_eq!(run(&["dgla-check", &wrong]).status.code(), Some(2));
}
