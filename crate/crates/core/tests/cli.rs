use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_syntomic")).args(args).output().unwrap()
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_syntomic"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = run(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    serde_json::from_str(&ok(&a)).unwrap()
}

#[test]
fn spec_examples() {
    assert_eq!(ok(&["adem", "--p", "2", "--base", "k", "Sq2 Sq2"]).trim(), "0");
    assert_eq!(ok(&["adem", "--base", "O", "Sq2 Sq2"]).trim(), "tau Sq3 Sq1");

    let text = ok(&["basis", "--p", "2", "--deg-max", "3"]);
    let words: Vec<String> = text.lines().skip(1).map(|l| l.split_whitespace().skip(2).collect::<Vec<_>>().join(" ")).collect();
    assert_eq!(words, ["1", "Sq1", "Sq2", "Sq2 Sq1", "Sq3"]);
    assert_eq!(json(&["basis", "--p", "2", "--deg-max", "3"])["basis"].as_array().unwrap().len(), 5);

    let o = run(&["verify", "wu", "--model", "P2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Sq(v) = w"));
}

#[test]
fn other_subcommands() {
    assert_eq!(ok(&["coproduct", "Sq2"]).trim(), "1 ⊗ Sq2 + Sq2 ⊗ 1");
    assert_eq!(ok(&["coproduct", "--base", "O", "Sq2"]).trim(), "1 ⊗ Sq2 + tau (Sq1 ⊗ Sq1) + Sq2 ⊗ 1");
    assert_eq!(ok(&["antipode", "Sq3"]).trim(), "Sq2 Sq1");
    assert_eq!(json(&["dual", "pair", "Sq3 Sq1", "Sq3 Sq1"])["coeff"], serde_json::json!([1]));
    assert_eq!(json(&["dual", "pair", "Sq3 Sq1", "Sq3"])["coeff"], serde_json::json!([]));
    assert_eq!(ok(&["dual", "sigma", "Sq3"]).trim(), "Sq2 Sq1");
    assert!(ok(&["convert", "--i", "1", "--b", "1"]).contains("Ps^1"));
    assert!(ok(&["wu", "--deg-max", "4"]).contains("w2"));
    assert!(ok(&["model", "--model", "P1xP2"]).contains("w = "));
    for args in [
        &["bockstein", "square", "--a", "2", "--b", "1", "--n", "2"][..],
        &["bockstein", "psi", "--k", "1", "--n", "2"],
        &["bockstein", "mat-form", "--seed", "3", "--n", "2"],
        &["verify", "action", "--model", "P3"],
        &["verify", "bockstein", "--seed", "1", "--n", "2"],
        &["verify", "pairing", "--pd-k", "2", "--nu", "1", "--n", "2"],
        &["verify", "fgauge"],
        &["fgauge", "pipeline"],
    ] {
        ok(args);
    }
    let s = json(&["fgauge", "sections", "--p", "2", "--f", "1"]);
    assert_eq!((s["h0"].as_u64(), s["h1"].as_u64()), (Some(1), Some(1)));
}

#[test]
fn exit_codes() {
    // usage and input errors
    for args in [
        &["frobnicate"][..],
        &["adem", "--bogus"],
        &["adem", "Sq2 Foo"],
        &["adem", "--p", "4", "Sq1"],
        &["verify", "wu", "--model", "Q2"],
        &["dual", "pair", "Sq1"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    let o = run_stdin(&["adem", "--input", "-"], "{\"p\": 2,\n  \"base\": ");
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    // a broken model fails verification with a witness
    let mut m = json(&["model", "--model", "P1"]);
    let zero: Vec<Value> = m["action"]["powers"]["0"][0].as_array().unwrap().iter().map(|_| 0.into()).collect();
    m["action"]["powers"]["0"][0] = Value::Array(zero);
    let o = run_stdin(&["verify", "action", "--input", "-", "--format", "json"], &m.to_string());
    assert_eq!(o.status.code(), Some(1));
    let rep: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(rep.to_string().contains("P^0 identity"));
}

#[test]
fn deterministic_output() {
    for args in [
        &["adem", "--base", "O", "Sq4 Sq4 + Sq2 Sq3", "--format", "json"][..],
        &["basis", "--p", "3", "--deg-max", "20"],
        &["dual", "coproduct", "Sq4 Sq2", "--base", "O"],
        &["bockstein", "dga", "--seed", "7", "--format", "json"],
        &["fgauge", "pipeline", "--format", "json"],
        &["verify", "bockstein", "--seed", "5", "--format", "json"],
    ] {
        assert_eq!(run(args).stdout, run(args).stdout, "{args:?}");
    }
}

#[test]
fn json_round_trips() {
    let e = ok(&["adem", "--base", "O", "Sq4 Sq4 + Sq5 Sq2", "--format", "json"]);
    let again = run_stdin(&["adem", "--base", "O", "--format", "json"], &e);
    assert_eq!(stdout(&again), e);

    let d = ok(&["bockstein", "dga", "--seed", "11", "--format", "json"]);
    let again = run_stdin(&["bockstein", "dga", "--input", "-", "--format", "json"], &d);
    assert_eq!(stdout(&again), d);

    let dir = std::env::temp_dir().join(format!("syntomic-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("x.json");
    let p = path.to_str().unwrap();
    ok(&["dual", "multiply", "Sq1", "Sq2", "--base", "O", "--format", "json", "--out", p]);
    let written = std::fs::read_to_string(&path).unwrap();
    let once = ok(&["dual", "chi", "--base", "O", "--format", "json", &written]);
    let twice = ok(&["dual", "chi", "--base", "O", "--format", "json", &once]);
    // χ is an involution, so two passes return the written value byte for byte
    assert_eq!(twice, written);
    std::fs::remove_dir_all(&dir).unwrap();
}
