use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

struct Scratch(PathBuf);

impl Scratch {
    fn new(name: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("ncgdist-cli-{name}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn file(&self, name: &str, body: &str) -> PathBuf {
        let p = self.0.join(name);
        std::fs::write(&p, body).unwrap();
        p
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn ncgdist(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncgdist")).args(args).output().unwrap()
}

fn run_paths(args: &[&str], paths: &[&PathBuf]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ncgdist"));
    cmd.args(args);
    for p in paths {
        cmd.arg(p);
    }
    cmd.output().unwrap()
}

const STATE_A: &str = r#"{"type":"pure","block":0,"vector":[1]}"#;
const STATE_B: &str = r#"{"type":"pure","block":1,"vector":[1]}"#;

fn two_point(m: f64) -> String {
    format!(
        r#"{{"algebra":{{"blocks":[1,1]}},"representation":{{"kind":"diagonal"}},"dirac":{{"re":[[0,{m}],[{m},0]]}},"grading":[[1,0],[0,-1]]}}"#
    )
}

fn compute(s: &Scratch, triple: &str) -> Output {
    let t = s.file("triple.json", triple);
    let a = s.file("a.json", STATE_A);
    let b = s.file("b.json", STATE_B);
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ncgdist"));
    cmd.arg("compute").arg("--triple").arg(t).arg("--state-a").arg(a).arg("--state-b").arg(b);
    cmd.output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn compute_two_point_distance() {
    let s = Scratch::new("two-point");
    let out = compute(&s, &two_point(2.0));
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["outcome"], "finite");
    assert!((v["value"].as_f64().unwrap() - 0.5).abs() < 1e-6);
}

#[test]
fn compute_reports_infinite_distance_with_success() {
    let s = Scratch::new("infinite");
    let out = compute(&s, &two_point(0.0));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["outcome"], "infinite");
}

#[test]
fn malformed_input_exits_with_code_2() {
    let s = Scratch::new("malformed");
    let out = compute(&s, r#"{"algebra":{"blocks":[1,"x"]}}"#);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/algebra/blocks"));

    let missing = s.0.join("absent.json");
    let out = run_paths(&["catalog", "eval", "two_point"], &[&missing]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn catalog_lists_and_evaluates() {
    let out = ncgdist(&["catalog", "list"]);
    assert_eq!(out.status.code(), Some(0));
    let list = json(&out);
    let ids: Vec<&str> = list.as_array().unwrap().iter().map(|e| e["id"].as_str().unwrap()).collect();
    assert!(ids.contains(&"three_point"));
    assert!(ids.contains(&"moyal_eigen"));

    let s = Scratch::new("catalog");
    let p = s.file("p.json", r#"{"d12":1,"d13":1,"d23":1}"#);
    let out = run_paths(&["catalog", "eval", "three_point"], &[&p]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    for key in ["d12", "d13", "d23"] {
        assert!((v[key].as_f64().unwrap() - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    let out = run_paths(&["catalog", "eval", "no_such_formula"], &[&p]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn moyal_eigen_table() {
    let s = Scratch::new("moyal");
    let p = s.file("p.json", r#"[{"theta":2,"m":0,"n":1},{"id":"x","theta":2,"m":0,"n":2}]"#);
    let out = run_paths(&["moyal", "eigen", "--params"], &[&p]);
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(rdr.headers().unwrap(), vec!["id", "m", "n", "theta", "value", "formula_ref"]);
    let values: Vec<f64> = rdr.records().map(|r| r.unwrap()[4].parse().unwrap()).collect();
    assert!((values[0] - 1.0).abs() < 1e-15);
    assert!((values[1] - (1.0 + 0.5f64.sqrt())).abs() < 1e-15);
}

#[test]
fn verify_writes_deterministic_report() {
    let s = Scratch::new("verify");
    let (a, b) = (s.0.join("a.csv"), s.0.join("b.csv"));
    for p in [&a, &b] {
        let out = run_paths(&["verify", "kantorovich", "--seed", "5", "--out"], &[p]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let first = std::fs::read(&a).unwrap();
    assert_eq!(first, std::fs::read(&b).unwrap());
    let mut rdr = csv::Reader::from_reader(first.as_slice());
    assert_eq!(
        rdr.headers().unwrap(),
        vec!["case_id", "formula_ref", "expected", "computed", "abs_err", "rel_err", "status", "runtime_ms"]
    );
    assert!(rdr.records().all(|r| &r.unwrap()[6] == "pass"));
}

#[test]
fn unknown_suite_is_rejected() {
    let out = ncgdist(&["verify", "everything"]);
    assert_eq!(out.status.code(), Some(2));
}
