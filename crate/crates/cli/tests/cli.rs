use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lcs-lab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lcs-lab")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn ok(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["schema"], "lcs-lab/1");
    v
}

fn typed_error(args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["schema"], "lcs-lab/1");
    assert!(v["error"]["message"].is_string());
    v["error"]["kind"].as_str().unwrap().to_string()
}

#[test]
fn torus_class_has_no_novikov_homology() {
    let v = ok(&[
        "novikov-betti",
        "--complex",
        &fixture("torus.json"),
        "--cocycle",
        &fixture("c10.json"),
        "--field",
        "Q",
    ]);
    assert_eq!(v["betti"], serde_json::json!([0, 0, 0]));
    let v = ok(&["novikov-betti", "--complex", &fixture("torus.json")]);
    assert_eq!(v["betti"], serde_json::json!([1, 2, 1]));
}

#[test]
fn displacement_table_is_positive() {
    let v = ok(&["displace", "--beta", "dq1", "--tmax", "1.0"]);
    let rows = v["rows"].as_array().unwrap();
    assert!(rows.len() >= 3);
    for r in rows {
        let d = r["min_distance"].as_f64().unwrap();
        assert!(d > 0.0);
        assert!((d - r["t"].as_f64().unwrap()).abs() < 1e-10);
    }
    assert_eq!(v["all_positive"], true);
}

#[test]
fn circle_family_theorem_report() {
    let v = ok(&[
        "theorem-check",
        "--family",
        &fixture("f1.json"),
        "--beta",
        "0.1 dq",
        "--complex",
        &fixture("s1.json"),
    ]);
    assert_eq!((v["count"].as_u64(), v["rank"].as_u64()), (Some(2), Some(0)));
    assert_eq!(v["satisfied"], true);
    let v = ok(&[
        "theorem-check",
        "--family",
        &fixture("t2.json"),
        "--beta",
        "0",
        "--complex",
        &fixture("torus.json"),
    ]);
    assert_eq!((v["count"].as_u64(), v["rank"].as_u64()), (Some(4), Some(4)));
}

#[test]
fn remaining_subcommands() {
    let v = ok(&["duality-check", "--complex", &fixture("klein.json"), "--field", "F2"]);
    assert_eq!(v["dual"], true);
    let v = ok(&["identities", "--beta", "dq", "--per-circle", "8"]);
    assert_eq!(v["passed"], true);
    let v = ok(&["circle-mn", "--eta", "-0.5 dq + sin(q) dq", "--period", "-1"]);
    assert_eq!(v["agrees"], true);
    assert_eq!(v["zeros"].as_array().unwrap().len(), 2);
    let v = ok(&[
        "gf-critical",
        "--family",
        &fixture("bump.json"),
        "--beta",
        "0.1 dq",
        "--pipeline",
        "--lagrangian",
        "--epsilon",
        "0.05",
    ]);
    assert_eq!(v["count"], 2);
    assert_eq!(v["lagrangian"]["count"], 2);
    assert_eq!(v["pipeline"]["bijection"], true);
}

#[test]
fn moser_writes_csv_and_report() {
    let csv = scratch("moser.csv");
    let report = scratch("moser.json");
    let out = run(&[
        "moser",
        "--seeds",
        "4",
        "--dt",
        "1e-2",
        "--csv",
        csv.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(v["report"]["max_residual"].as_f64().unwrap() < 1e-5);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,q1,q2,f_t"));
    // 16 seeds at t = 0 and four check times.
    assert_eq!(lines.count(), 16 * 5);
}

#[test]
fn reports_are_byte_identical() {
    let cases: Vec<Vec<String>> = vec![
        vec!["gf-critical".into(), "--family".into(), fixture("bump.json"), "--beta".into(), "0.1 dq".into(), "--pipeline".into(), "--epsilon".into(), "0.05".into()],
        vec!["displace".into(), "--beta".into(), "dq1 + 0.5 dq2".into(), "--dim".into(), "2".into()],
        vec!["moser".into(), "--seeds".into(), "4".into(), "--dt".into(), "1e-2".into()],
        vec!["identities".into(), "--beta".into(), "dq1 + cos(q2) dq2".into(), "--per-circle".into(), "6".into()],
    ];
    for args in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn typed_errors_exit_two() {
    assert_eq!(
        typed_error(&["novikov-betti", "--complex", &fixture("torus.json"), "--cocycle", &fixture("short.json")]),
        "homology.CocycleLength"
    );
    assert_eq!(typed_error(&["duality-check", "--complex", &fixture("klein.json")]), "homology.NonOrientable");
    assert_eq!(typed_error(&["displace", "--beta", "0"]), "dynamics.VanishingBeta");
    assert_eq!(typed_error(&["displace", "--beta", "dq +"]), "calculus.Parse");
    assert_eq!(typed_error(&["displace", "--beta", "dq", "--dt", "5"]), "input.OutOfRange");
    assert_eq!(typed_error(&["novikov-betti", "--complex", "/nonexistent/x.json"]), "io.Read");
    assert_eq!(typed_error(&["novikov-betti", "--complex", &fixture("s1.json"), "--field", "R"]), "input.Field");
    assert_eq!(
        typed_error(&["theorem-check", "--family", &fixture("f1.json"), "--beta", "0.1 dq", "--complex", &fixture("s1.json"), "--cocycle", &fixture("minus.json")]),
        "family.PeriodMismatch"
    );
}

#[test]
fn usage_errors_exit_64() {
    let out = run(&["novikov-betti", "--complex", &fixture("torus.json"), "--bogus"]);
    assert_eq!(out.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage:"));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(64));
    assert_eq!(run(&[]).status.code(), Some(64));
}

#[test]
fn help_documents_the_grammar() {
    let out = run(&["displace", "--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("basis   = \"dq\" [ index ]"));
    assert!(text.contains("trig    = (\"cos\" | \"sin\")"));
    let out = run(&["--help"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("circle-mn"));
}
