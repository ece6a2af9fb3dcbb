use std::process::{Command, Output};

use kwise_core::rational::{format_rational, parse_rational};
use serde_json::Value;

fn kwise(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kwise"))
        .args(args)
        .env_remove("KWISE_THREADS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn compute_small() {
    let out = kwise(&["compute", "--n", "4", "--k", "2", "--p", "1/2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["M"], "1/6");
    assert_eq!(v["support"], serde_json::json!([1, 2, 4]));
    assert_eq!(v["dual_zeros"], serde_json::json!([1, 2]));
    assert!(v["checks"].as_object().unwrap().values().all(|c| c == true));
    assert!(v.get("reduction").is_none());

    let text = stdout(&out);
    let keys = ["\"n\"", "\"k\"", "\"p\"", "\"M\"", "\"support\"", "\"masses\"", "\"dual_zeros\"", "\"dual_coeffs\"", "\"degenerate\"", "\"checks\""];
    let positions: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn compute_odd_and_both() {
    let v = json(&kwise(&["compute", "--n", "4", "--k", "3", "--p", "1/2"]));
    assert_eq!(v["M"], "1/8");
    assert_eq!(v["reduction"], "odd");

    let out = kwise(&["compute", "--n", "20", "--k", "6", "--p", "1/2", "--method", "both"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["M"], "1/1540");
    assert_eq!(v["dual_search"]["M"], "1/1540");
    assert_eq!(v["dual_search"]["dual_zeros"], serde_json::json!([5, 6, 9, 10, 13, 14]));

    let v = json(&kwise(&["compute", "--n", "3", "--k", "2", "--p", "1/2", "--method", "dual"]));
    assert_eq!(v["degenerate"], true);
    assert_eq!(v["M"], "1/4");
}

#[test]
fn exit_codes() {
    let out = kwise(&["compute", "--n", "3", "--k", "5", "--p", "1/2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("k exceeds n"));
    assert_eq!(kwise(&["compute", "--n", "3", "--k", "2", "--p", "0.5e0"]).status.code(), Some(1));
    assert_eq!(kwise(&["compute", "--n", "3", "--k", "2", "--p", "1"]).status.code(), Some(1));
    assert_eq!(kwise(&["verify", "--suite", "nonsense"]).status.code(), Some(1));
    assert_eq!(kwise(&["bogus"]).status.code(), Some(1));
    let out = kwise(&["compute", "--n", "40", "--k", "10", "--p", "1/2", "--method", "dual", "--max-candidates", "1000"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(kwise(&["scan", "--n", "3", "--k", "", "--p", "1/2"]).status.code(), Some(1));
    assert_eq!(kwise(&["--help"]).status.code(), Some(0));
}

#[test]
fn decimal_p_is_exact() {
    let a = kwise(&["compute", "--n", "9", "--k", "4", "--p", "0.3"]);
    let b = kwise(&["compute", "--n", "9", "--k", "4", "--p", "3/10"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["p"], "3/10");
}

#[test]
fn scan_rows() {
    let out = kwise(&["scan", "--n", "3,4", "--k", "2", "--p", "1/2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,k,p,M,M_tilde,ratio,degenerate,regime,status"));
    assert_eq!(lines.next(), Some("3,2,1/2,1/4,1/4,1,true,not-applicable,ok"));
    assert_eq!(lines.next(), Some("4,2,1/2,1/6,1/5,6/5,false,not-applicable,ok"));
    assert_eq!(lines.next(), None);

    let text = stdout(&kwise(&["scan", "--n", "20", "--k", "6", "--p", "3/10", "--decimal"]));
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row.len(), 12);
    assert!(parse_rational(row[5]).unwrap() >= parse_rational("1").unwrap());

    // partial failures stay in their rows
    let text = stdout(&kwise(&["scan", "--n", "3..=5", "--k", "4", "--p", "1/2"]));
    assert!(text.lines().nth(1).unwrap().ends_with("\"error: k exceeds n (k = 4, n = 3)\""));
    assert!(text.lines().nth(2).unwrap().ends_with(",ok"));
}

#[test]
fn poly_tables() {
    let text = stdout(&kwise(&["poly", "--n", "4", "--k", "2", "--p", "1/2", "--samples", "5"]));
    assert_eq!(text, "x,value,zero\n0,1/3,false\n1,0,true\n2,0,true\n3,1/3,false\n4,1,false\n");

    for (p, k, pairs) in [("1/2", "6", 3), ("3/10", "8", 4)] {
        let text = stdout(&kwise(&["poly", "--n", "20", "--k", k, "--p", p, "--samples", "401"]));
        let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
        assert_eq!(rows.len(), 401);
        assert_eq!(rows[400], ["20", "1", "false"]);
        let zeros: Vec<u64> = rows.iter().filter(|r| r[2] == "true").map(|r| r[0].parse().unwrap()).collect();
        assert_eq!(zeros.len(), 2 * pairs);
        assert!(zeros.chunks(2).all(|c| c[1] == c[0] + 1));
    }

    let v = json(&kwise(&["poly", "--n", "4", "--k", "2", "--p", "1/2", "--samples", "3", "--format", "json"]));
    assert_eq!(v["samples"][1]["x"], "2");
    assert_eq!(kwise(&["poly", "--n", "4", "--k", "3", "--p", "1/2"]).status.code(), Some(1));
}

fn collect_strings(v: &Value, out: &mut Vec<String>) {
    match v {
        Value::String(s) => out.push(s.clone()),
        Value::Array(a) => a.iter().for_each(|x| collect_strings(x, out)),
        Value::Object(o) => o.values().for_each(|x| collect_strings(x, out)),
        _ => {}
    }
}

#[test]
fn rationals_round_trip() {
    let v = json(&kwise(&["compute", "--n", "20", "--k", "8", "--p", "3/10", "--method", "both"]));
    let mut strings = Vec::new();
    collect_strings(&v, &mut strings);
    assert!(strings.len() > 20);
    for s in strings.iter().filter(|s| s.chars().next().is_some_and(|c| c == '-' || c.is_ascii_digit())) {
        assert_eq!(&format_rational(&parse_rational(s).unwrap()), s);
    }
}

#[test]
fn output_is_deterministic() {
    let runs = [
        vec!["compute", "--n", "14", "--k", "6", "--p", "1/3", "--method", "both"],
        vec!["scan", "--n", "5..=9", "--k", "2,4", "--p", "1/2,2/3", "--method", "both", "--decimal"],
        vec!["sample", "--n", "4", "--k", "2", "--p", "1/2", "--count", "500", "--seed", "11"],
        vec!["verify", "--suite", "perturbation", "--max-n", "12", "--configs-per-cell", "5"],
    ];
    for args in runs {
        let a = kwise(&args);
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        let mut more = vec!["--threads", "3"];
        more.extend(&args);
        assert_eq!(a.stdout, kwise(&more).stdout, "{args:?}");
        let c = Command::new(env!("CARGO_BIN_EXE_kwise")).args(&args).env("KWISE_THREADS", "2").output().unwrap();
        assert_eq!(a.stdout, c.stdout, "{args:?}");
    }
}

#[test]
fn sample_lines() {
    let out = kwise(&["sample", "--n", "5", "--k", "5", "--p", "1/2", "--count", "7", "--seed", "1"]);
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 7);
    assert!(text.lines().all(|l| l.len() == 5 && l.bytes().all(|b| b == b'0' || b == b'1')));
    assert!(text.ends_with('\n'));
    assert_eq!(kwise(&["sample", "--n", "5", "--k", "2", "--p", "1/2", "--count", "0"]).status.code(), Some(1));
}

#[test]
fn verify_reports() {
    let out = kwise(&["verify", "--suite", "chebyshev", "--max-m", "20", "--max-d", "8", "--max-sup-m", "10", "--monic-samples", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let records = v.as_array().unwrap();
    assert!(!records.is_empty());
    for r in records {
        assert!(r["check"].is_string() && r["params"].is_object());
        assert_eq!(r["pass"], true);
    }
    assert_eq!(kwise(&["verify", "--suite", "probshift", "--max-n", "100"]).status.code(), Some(0));
    assert_eq!(kwise(&["verify", "--suite", "duality", "--max-n", "12"]).status.code(), Some(0));
}

#[test]
fn out_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let out = kwise(&["compute", "--n", "4", "--k", "2", "--p", "1/2", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written = std::fs::read(&path).unwrap();
    assert_eq!(written, kwise(&["compute", "--n", "4", "--k", "2", "--p", "1/2"]).stdout);

    let path = dir.path().join("bits.txt");
    kwise(&["sample", "--n", "4", "--k", "2", "--p", "1/2", "--count", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 3);

    let bad = dir.path().join("missing").join("x.csv");
    let out = kwise(&["scan", "--n", "3", "--k", "2", "--p", "1/2", "--out", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}
