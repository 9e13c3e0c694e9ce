use std::path::{Path, PathBuf};

use framekit::cli::{run, EXIT_INPUT, EXIT_OK, EXIT_VIOLATION};
use serde_json::Value;
use tempfile::TempDir;

struct Outcome {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Outcome {
    fn json(&self) -> Value {
        serde_json::from_str(self.stdout.trim()).expect("stdout is JSON")
    }

    fn error_kind(&self) -> String {
        assert_eq!(self.stderr.lines().count(), 1, "{}", self.stderr);
        let v: Value = serde_json::from_str(self.stderr.trim()).expect("stderr is JSON");
        v["error"].as_str().unwrap().to_owned()
    }
}

fn framekit(args: &[&str]) -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("framekit").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Outcome {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn generate(dir: &TempDir, name: &str, spec: &str) -> PathBuf {
    let out = path(dir, name);
    let o = framekit(&["gen", "--spec", spec, "--out", s(&out)]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    out
}

#[test]
fn flat_frame_is_parseval() {
    let dir = TempDir::new().unwrap();
    let sys = generate(&dir, "l.json", r#"{"kind":"lemma51","n":10}"#);
    let o = framekit(&["analyze", "--in", s(&sys)]);
    assert_eq!(o.code, EXIT_OK);
    let v = o.json();
    assert_eq!(v["v"], 1);
    assert!((v["frame"]["lowerBound"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["frame"]["upperBound"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v["frame"]["isTight"], true);
    assert_eq!(v["metrics"]["riesz"], "inf");
}

#[test]
fn orthonormal_basis_has_unit_constants() {
    let dir = TempDir::new().unwrap();
    let spec = path(&dir, "spec.json");
    std::fs::write(&spec, r#"{"kind":"orthonormal","n":5}"#).unwrap();
    let sys = generate(&dir, "onb.json", s(&spec));
    let v = framekit(&["analyze", "--in", s(&sys)]).json();
    for key in ["riesz", "hilbertian", "besselian", "schauder", "separation"] {
        assert!(
            (v["metrics"][key].as_f64().unwrap() - 1.0).abs() < 1e-12,
            "{key}"
        );
    }
}

#[test]
fn frame_extraction_writes_a_trace() {
    let dir = TempDir::new().unwrap();
    let sys = generate(&dir, "l.json", r#"{"kind":"lemma51","n":40}"#);
    let trace = path(&dir, "trace.json");
    let o = framekit(&[
        "extract",
        "--in",
        s(&sys),
        "--mode",
        "frame",
        "--eps",
        "0.25",
        "--out",
        s(&trace),
    ]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    assert!(v["finalSubset"].as_array().unwrap().len() >= 30);
    assert_eq!(v["stopReason"], "coverageReached");
}

#[test]
fn selection_prints_a_result() {
    let dir = TempDir::new().unwrap();
    let sys = generate(&dir, "p.json", r#"{"kind":"perturbedPairs","n":4}"#);
    let v = framekit(&[
        "select",
        "--in",
        s(&sys),
        "--size",
        "4",
        "--method",
        "exhaustive",
    ])
    .json();
    assert_eq!(v["subset"].as_array().unwrap().len(), 4);
    // one vector from each orthogonal pair; the longer ones have norm sqrt(1 + 1/16)
    assert_eq!(v["subset"], serde_json::json!([1, 3, 5, 7]));
    assert!((v["certifiedLowerBound"].as_f64().unwrap() - 1.0625f64.sqrt()).abs() < 1e-12);
    assert_eq!(v["normalizationApplied"], false);
}

#[test]
fn verification_exit_codes() {
    let dir = TempDir::new().unwrap();
    let sys = generate(&dir, "l.json", r#"{"kind":"lemma51","n":6}"#);
    let ok = framekit(&["verify-lemmas", "--in", s(&sys), "--canonical"]);
    assert_eq!(ok.code, EXIT_OK);
    assert_eq!(ok.json()["holds"], true);
    let strict = framekit(&["verify-lemmas", "--in", s(&sys), "--tol", "1e-300"]);
    assert_eq!(strict.code, EXIT_VIOLATION);
    assert_eq!(strict.json()["holds"], false);
}

#[test]
fn input_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let bad = path(&dir, "bad.json");
    std::fs::write(&bad, "{\"v\":1,\"dim\":2,").unwrap();
    let o = framekit(&["analyze", "--in", s(&bad)]);
    assert_eq!(o.code, EXIT_INPUT);
    assert_eq!(o.error_kind(), "SchemaError");
    assert!(o.stdout.is_empty());

    let missing = framekit(&["analyze", "--in", s(&path(&dir, "absent.json"))]);
    assert_eq!(missing.code, EXIT_INPUT);

    let half = generate(
        &dir,
        "h.json",
        r#"{"kind":"duplicated","n":3,"halfSpace":true}"#,
    );
    let o = framekit(&[
        "extract",
        "--in",
        s(&half),
        "--mode",
        "frame",
        "--eps",
        "0.2",
        "--out",
        s(&path(&dir, "t.json")),
    ]);
    assert_eq!(o.code, EXIT_INPUT);
    assert_eq!(o.error_kind(), "NotSpanning");

    let o = framekit(&[
        "gen",
        "--spec",
        r#"{"kind":"lemma51","n":0}"#,
        "--out",
        s(&path(&dir, "z.json")),
    ]);
    assert_eq!(o.code, EXIT_INPUT);

    let o = framekit(&[
        "extract",
        "--in",
        s(&half),
        "--mode",
        "sideways",
        "--eps",
        "0.2",
        "--out",
        "x",
    ]);
    assert_eq!(o.error_kind(), "UsageError");
}

#[test]
fn sweep_is_byte_deterministic() {
    let dir = TempDir::new().unwrap();
    let write_plan = |name: &str| {
        let out = path(&dir, &format!("{name}.csv"));
        let plan = path(&dir, &format!("{name}.json"));
        let text = format!(
            r#"{{"v":1,"generator":{{"kind":"randomFrame","n":4,"m":8,"cond":10}},"parameter":"m",
            "values":[12,6,9],"extraction":{{"mode":"frame","eps":0.3}},
            "metrics":["lowerBound","upperBound","selected","stopReason"],"output":{},"seed":11}}"#,
            serde_json::to_string(s(&out)).unwrap()
        );
        std::fs::write(&plan, text).unwrap();
        (plan, out)
    };
    let (plan_a, out_a) = write_plan("a");
    let (plan_b, out_b) = write_plan("b");
    assert_eq!(framekit(&["sweep", "--plan", s(&plan_a)]).code, EXIT_OK);
    assert_eq!(framekit(&["sweep", "--plan", s(&plan_b)]).code, EXIT_OK);
    let a = std::fs::read(&out_a).unwrap();
    assert_eq!(a, std::fs::read(&out_b).unwrap());
    let text = String::from_utf8(a).unwrap();
    let values: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap())
        .collect();
    assert_eq!(values, ["6", "9", "12"]);
}
