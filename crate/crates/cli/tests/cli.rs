use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn cheeger(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_cheeger"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary starts");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).expect("stdout is JSON")
}

fn number(v: &Value) -> f64 {
    v.to_string().parse().unwrap()
}

fn generate(args: &[&str]) -> String {
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    let o = cheeger(&full, "");
    assert_eq!(o.status.code(), Some(0));
    stdout(&o)
}

#[test]
fn cycle_certifies() {
    let o = cheeger(&["certify", "-", "--k", "3"], &generate(&["cycle", "8"]));
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["holds"], Value::Bool(true));
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn all_k_certifies() {
    let o = cheeger(&["certify", "-", "--k", "2", "--all-k"], &generate(&["barbell", "4"]));
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["holds"], Value::Bool(true));
}

#[test]
fn complete_four_sweeps_to_two_thirds() {
    let o = cheeger(&["sweep", "-"], &generate(&["complete", "4"]));
    assert_eq!(o.status.code(), Some(0));
    assert!((number(&json(&o)["phi"]) - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn sweep_trace_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    let o = cheeger(&["sweep", "-", "--split", "--trace", path.to_str().unwrap()], &generate(&["cycle", "8"]));
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(path).unwrap();
    assert!(csv.starts_with("threshold,conductance\n"));
    assert!(csv.lines().count() >= 2);
}

#[test]
fn spectrum_of_four_cycle() {
    let o = cheeger(&["spectrum", "-", "--top", "3"], &generate(&["cycle", "4"]));
    let eig: Vec<f64> = json(&o)["eigenvalues"].as_array().unwrap().iter().map(number).collect();
    assert_eq!(eig.len(), 3);
    for (a, b) in eig.iter().zip([0.0, 1.0, 1.0]) {
        assert!((a - b).abs() < 1e-12);
    }
    let o = cheeger(&["spectrum", "-", "--signless"], &generate(&["cycle", "4"]));
    let eig = json(&o)["eigenvalues"].as_array().unwrap().iter().map(number).collect::<Vec<_>>();
    assert!(eig[0].abs() < 1e-12);
}

#[test]
fn separator_on_barbell() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.jsonl");
    let o = cheeger(&["separator", "-", "--k", "2", "--trace", trace.to_str().unwrap()], &generate(&["barbell", "4"]));
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!((number(&v["conductance"]) - 1.0 / 13.0).abs() < 1e-15);
    let lines = std::fs::read_to_string(trace).unwrap();
    assert_eq!(lines.lines().count(), 1);
    let rec: Value = serde_json::from_str(lines.lines().next().unwrap()).unwrap();
    assert_eq!(rec["branch"], "sweep");
}

#[test]
fn maxcut_on_even_cycle() {
    let o = cheeger(&["maxcut", "-", "--k", "2"], &generate(&["cycle", "10"]));
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(number(&json(&o)["cut_fraction"]), 1.0);
}

#[test]
fn phik_of_two_arcs() {
    let dir = tempfile::tempdir().unwrap();
    let parts = dir.path().join("parts.txt");
    std::fs::write(&parts, "0 1 2 3\n4 5 6 7\n").unwrap();
    let o = cheeger(&["phik", "-", "--parts", parts.to_str().unwrap()], &generate(&["cycle", "8"]));
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(number(&json(&o)["phi_k"]), 0.25);
}

#[test]
fn generators_round_trip_through_the_parser() {
    for args in [
        vec!["planted", "32", "0.5", "0.1", "--seed", "3"],
        vec!["expanders", "16", "2", "--seed", "2"],
        vec!["gadget", "4", "1"],
        vec!["hypercube", "3"],
        vec!["path", "5"],
    ] {
        let text = generate(&args);
        let o = cheeger(&["spectrum", "-", "--top", "1"], &text);
        assert_eq!(o.status.code(), Some(0), "{args:?}");
        assert_eq!(generate(&args), text, "{args:?} is not deterministic");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(cheeger(&["sweep", "-"], "0 0 1.0\n").status.code(), Some(3));
    assert_eq!(cheeger(&["sweep", "-"], "0 1 x\n").status.code(), Some(3));
    assert_eq!(cheeger(&["sweep", "--nope", "-"], "").status.code(), Some(2));
    assert_eq!(cheeger(&["certify", "-", "--k", "9"], &generate(&["cycle", "4"])).status.code(), Some(2));
    assert_eq!(cheeger(&["gen", "cycle", "2"], "").status.code(), Some(2));
    assert_eq!(cheeger(&["sweep", "/nonexistent/graph.txt"], "").status.code(), Some(2));
    let capped = Command::new(env!("CARGO_BIN_EXE_cheeger"))
        .args(["spectrum", "-"])
        .env("SPECTRAL_CAP", "4")
        .stdin(Stdio::piped())
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .and_then(|mut c| {
            c.stdin.take().unwrap().write_all(generate(&["cycle", "8"]).as_bytes())?;
            c.wait()
        })
        .unwrap();
    assert_eq!(capped.code(), Some(4));
}

#[test]
fn verify_suite_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let ra = cheeger(&["verify-suite", "--seed", "1", "--out", a.to_str().unwrap()], "");
    let rb = cheeger(&["verify-suite", "--seed", "1", "--out", b.to_str().unwrap()], "");
    assert_eq!(ra.status.code(), Some(0));
    assert_eq!(rb.status.code(), Some(0));
    let (ta, tb) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    assert_eq!(ta, tb);
    let v: Value = serde_json::from_slice(&ta).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["all_pass"], Value::Bool(true));
}
