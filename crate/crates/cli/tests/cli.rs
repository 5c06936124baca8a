use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_c1kahler"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn c1kahler")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const B2: &str = r#"{"family":"B","rank":2,"black":[1]}"#;
const B2_BUNDLE: &str = r#"{"string":[2],"end":"left","char":[2]}"#;

#[test]
fn analyze_reports_koszul_pairing() {
    let out = run(&["analyze", "--diagram", r#"{"family":"A","rank":3,"black":[1]}"#]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["koszul_pairings"], serde_json::json!(["1/2"]));
    assert_eq!(v["t_root_count"], 2);
    assert_eq!(v["real_dim"], 6);
}

#[test]
fn verify_cpn_passes() {
    let out = run(&["verify-cpn", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("kappa^2 = 1/8"));
    assert!(text.contains("lambda = 3"));
    assert!(text.contains("c = 1/2*sqrt(2)"));
    assert!(text.trim_end().ends_with("PASS"));
}

#[test]
fn bundles_round_trip_through_solve() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bundles.json");
    let out = run(&["bundles", "--diagram", B2, "--max-char", "1", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let list: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let bundles = list["bundles"].as_array().unwrap();
    assert!(!bundles.is_empty());
    for b in bundles {
        let out = run(&["solve", "--diagram", B2, "--bundle", &b.to_string(), "--lambda", "-1"]);
        let code = out.status.code().unwrap();
        assert!(code == 0 || code == 2, "exit {code}");
        let report = json(&out);
        assert_eq!(&report["bundle"], b);
        assert_eq!(report["feasible"], code == 0);
    }
}

#[test]
fn solve_report_shape() {
    let out = run(&["solve", "--su", "3", "--lambda", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["feasible"], true);
    assert_eq!(v["lambda"], "4");
    assert_eq!(v["kappa_sq"], "1/9");
    assert_eq!(v["Z0"], serde_json::json!(["0"]));
    assert_eq!(v["c"], serde_json::json!({"coeff": "1", "sqrt": 1}));
    assert_eq!(v["complete"], false);
    assert!((v["domain_end"].as_f64().unwrap() - std::f64::consts::PI / 2f64.sqrt()).abs() < 1e-12);
    assert!(v["timestamp"].is_u64());
}

#[test]
fn output_is_deterministic_apart_from_timestamp() {
    let args = ["solve", "--diagram", B2, "--bundle", B2_BUNDLE, "--lambda", "-1"];
    let mut a = json(&run(&args));
    let mut b = json(&run(&args));
    a["timestamp"] = Value::Null;
    b["timestamp"] = Value::Null;
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn infeasible_exits_2() {
    let out = run(&[
        "solve",
        "--diagram",
        r#"{"family":"A","rank":2,"black":[2]}"#,
        "--bundle",
        r#"{"string":[1],"end":"left","char":[0]}"#,
        "--lambda",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["feasible"], false);
    assert!(v["reason"].as_str().unwrap().starts_with("flat-infeasible"));
}

#[test]
fn parse_errors_exit_4() {
    for args in [
        vec!["solve", "--su", "3", "--lambda", "x"],
        vec!["analyze", "--diagram", r#"{"family":"E","rank":6,"black":[1]}"#],
        vec!["analyze", "--diagram", r#"{"family":"A","rank":3,"black":[5]}"#],
        vec!["solve", "--diagram", B2, "--bundle", r#"{"string":[1],"end":"left","char":[1]}"#, "--lambda", "1"],
        vec!["analyze", "--diagram", "/nonexistent/diagram.json"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(4), "{args:?}");
        let err: Value = serde_json::from_slice(&out.stderr).unwrap();
        assert_eq!(err["error"], "parse");
    }
}

#[test]
fn z0_override_only_for_flat_problems() {
    let out = run(&["solve", "--su", "3", "--lambda", "1", "--z0", "1"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn profile_writes_csv_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["profile", "--diagram", B2, "--bundle", B2_BUNDLE, "--lambda", "-1", "--samples", "501"])
        .env("KE_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("profile.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,f,fdot,fddot,residual"));
    let mut rows = 0;
    let mut max_res: f64 = 0.0;
    for line in lines {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cols.len(), 5);
        max_res = max_res.max(cols[4]);
        rows += 1;
    }
    assert_eq!(rows, 501);
    assert!(max_res < 1e-8, "{max_res}");
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("profile.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["complete"], true);
    assert_eq!(report["end_kind"], "unbounded");
}

#[test]
fn profile_of_infeasible_problem_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "profile",
        "--diagram",
        r#"{"family":"A","rank":2,"black":[2]}"#,
        "--bundle",
        r#"{"string":[1],"end":"left","char":[0]}"#,
        "--lambda",
        "0",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("profile.csv").exists());
}

#[test]
fn profile_validates_options_first() {
    let out = run(&["profile", "--su", "3", "--lambda", "1", "--samples", "3"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn z0_override_is_used_for_flat_problems() {
    let d = r#"{"family":"D","rank":4,"black":[1,3]}"#;
    let b = r#"{"string":[2,4],"end":"left","char":[2,2]}"#;
    let out = run(&["solve", "--diagram", d, "--bundle", b, "--lambda", "0", "--z0", "1,2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["z0_source"], "supplied");
    assert_eq!(v["Z0"], serde_json::json!(["1", "0", "2"]));
    let v = json(&run(&["solve", "--diagram", d, "--bundle", b, "--lambda", "0"]));
    assert_eq!(v["z0_source"], "default-face");
    let out = run(&["solve", "--diagram", d, "--bundle", b, "--lambda", "0", "--z0", "-1,2"]);
    assert_eq!(out.status.code(), Some(2));
}
