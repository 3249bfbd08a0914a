use std::path::{Path, PathBuf};
use std::process::Command;

use jsonschema::JSONSchema;
use serde_json::{json, Value};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixtures() -> Vec<PathBuf> {
    let mut v: Vec<_> = std::fs::read_dir(root().join("fixtures"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "qasp"))
        .collect();
    v.sort();
    v
}

/// Runs the binary; returns the exit code and the parsed report.
fn run(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_qasp")).args(args).output().unwrap();
    let report = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), report)
}

fn assert_schema(report: &Value) {
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(root().join("schemas/report.json")).unwrap()).unwrap();
    let compiled = JSONSchema::compile(&schema).unwrap();
    if let Err(errors) = compiled.validate(report) {
        let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
        panic!("report violates schema: {msgs:?}\n{report:#}");
    };
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn reports_match_schema_on_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    for f in fixtures() {
        for args in [vec!["solve", s(&f), "--enumerate"], vec!["solve", s(&f), "--optimal"], vec!["verify", s(&f)]] {
            let (code, report) = run(&args);
            assert_eq!(code, 0, "{args:?}: {report:#}");
            assert_schema(&report);
        }
        let out = dir.path().join("out.qasp");
        let (code, report) = run(&["rewrite", s(&f), "-o", s(&out), "--trace"]);
        assert_eq!(code, 0, "{report:#}");
        assert_schema(&report);
        // the rewritten file parses back and is plain and alternating
        let (code, again) = run(&["solve", s(&out)]);
        assert_eq!(code, 0, "{again:#}");
        let quants = report["result"]["quantifiers"].as_array().unwrap();
        assert!(quants.windows(2).all(|w| w[0] != w[1]));
    }
}

#[test]
fn example_two_optimal_set() {
    let (code, report) = run(&["solve", s(&root().join("fixtures/example2.qasp")), "--optimal"]);
    assert_eq!(code, 0);
    assert_eq!(report["result"]["optimal"], json!([{ "set": ["b", "c"], "cost": [{ "level": 1, "weight": 1 }] }]));
}

#[test]
fn verify_agrees_on_fixtures_and_samples() {
    for f in fixtures() {
        let (code, report) = run(&["verify", s(&f), "--samples", "10", "--seed", "5"]);
        assert_eq!(code, 0, "{report:#}");
        assert_eq!(report["result"]["agree"], json!(true));
        assert_eq!(report["result"]["samples"]["checked"], json!(10));
    }
}

#[test]
fn deterministic_results() {
    let f = root().join("fixtures/nonground.qasp");
    let a = run(&["solve", s(&f), "--enumerate"]).1;
    let b = run(&["solve", s(&f), "--enumerate", "--sequential"]).1;
    assert_eq!(a["result"], b["result"]);
    assert_eq!(a["inputDigest"], b["inputDigest"]);

    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let gen = |d: &Path| {
        let (code, r) = run(&["gen", "qbf-ee", "--vars", "2", "2", "--conjuncts", "3", "--seed", "7", "-o", s(d)]);
        assert_eq!(code, 0, "{r:#}");
        assert_schema(&r);
        r
    };
    let (r1, r2) = (gen(d1.path()), gen(d2.path()));
    assert_eq!(r1["inputDigest"], r2["inputDigest"]);
    assert_eq!(r1["result"]["oracle"], r2["result"]["oracle"]);
    for name in ["qbf-ee-s7.json", "qbf-ee-s7.qasp"] {
        assert_eq!(std::fs::read(d1.path().join(name)).unwrap(), std::fs::read(d2.path().join(name)).unwrap());
    }
}

#[test]
fn generated_encoding_matches_oracle() {
    let d = tempfile::tempdir().unwrap();
    let (code, r) = run(&["gen", "minmax-clique", "--nodes", "4", "--i", "2", "--j", "2", "--seed", "1", "-o", s(d.path())]);
    assert_eq!(code, 0, "{r:#}");
    assert_eq!(r["result"]["oracle"]["kind"], json!("values"));
    let (code, r) = run(&["gen", "qbf-ee", "--vars", "2", "2", "--conjuncts", "3", "--seed", "7", "-o", s(d.path())]);
    assert_eq!(code, 0);
    let expected = r["result"]["oracle"]["value"].clone();
    let (code, solved) = run(&["solve", s(&d.path().join("qbf-ee-s7.qasp"))]);
    assert_eq!(code, 0);
    assert_eq!(solved["result"]["coherent"], expected);
}

#[test]
fn exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let empty = d.path().join("empty.qasp");
    std::fs::write(&empty, "a.\n").unwrap();
    let (code, r) = run(&["solve", s(&empty)]);
    assert_eq!(code, 2);
    assert_schema(&r);
    assert_eq!(r["error"]["kind"], json!("input"));

    let bad = d.path().join("bad.qasp");
    std::fs::write(&bad, "%@exists\na :- b(.\n").unwrap();
    assert_eq!(run(&["solve", s(&bad)]).0, 2);

    assert_eq!(run(&["solve", s(&d.path().join("missing.qasp"))]).0, 2);

    let (code, r) = run(&["gen", "nope", "--seed", "1", "-o", s(d.path())]);
    assert_eq!(code, 2);
    assert!(r["error"]["message"].as_str().unwrap().contains("unknown problem"));

    // clap rejects malformed command lines on its own
    assert_eq!(run(&["solve"]).0, 2);

    let f = root().join("fixtures/example2.qasp");
    let (code, r) = run(&["--max-ground", "1", "solve", s(&f)]);
    assert_eq!(code, 4, "{r:#}");
    assert_schema(&r);
    assert_eq!(r["error"]["kind"], json!("resource"));
}
