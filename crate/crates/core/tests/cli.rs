use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn siso(num: &str, den: &str) -> String {
    format!(r#"{{"schema_version": "1.0", "kind": "siso", "entries": [[{{"num": {num}, "den": {den}}}]]}}"#)
}

fn nugap(args: &[&dyn AsRef<std::ffi::OsStr>]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nugap")).args(args).output().unwrap()
}

fn result(out: &Output) -> Value {
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    doc["result"].clone()
}

#[test]
fn constant_gains_and_the_delay() {
    let dir = tempfile::tempdir().unwrap();
    let one = write(dir.path(), "one.json", &siso("[1.0]", "[1.0]"));
    let two = write(dir.path(), "two.json", &siso("[2.0]", "[1.0]"));
    let delay = write(dir.path(), "delay.json", &siso("[1.0]", "[0.0, 1.0]"));
    let zero = write(dir.path(), "zero.json", &siso("[]", "[1.0]"));

    let out = nugap(&[&"numetric", &one, &two, &"--json-only"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stderr.is_empty());
    let r = result(&out);
    assert!((r["value"].as_f64().unwrap() - 1.0 / 10f64.sqrt()).abs() < 1e-12);

    let r = result(&nugap(&[&"numetric", &delay, &zero]));
    assert_eq!(r["value"].as_f64(), Some(1.0));
    assert_eq!(r["winding"].as_i64(), Some(-1));
    assert_eq!(r["condition_met"].as_bool(), Some(false));

    let r = result(&nugap(&[&"margin", &zero, &zero]));
    assert_eq!(r["stabilizes"].as_bool(), Some(true));
    assert!((r["margin"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn margin_of_the_delay_loop() {
    let dir = tempfile::tempdir().unwrap();
    let delay = write(dir.path(), "delay.json", &siso("[1.0]", "[0.0, 1.0]"));
    let gain = write(dir.path(), "gain.json", &siso("[-2.0]", "[1.0]"));
    let zero = write(dir.path(), "zero.json", &siso("[]", "[1.0]"));
    let r = result(&nugap(&[&"margin", &delay, &gain]));
    assert_eq!(r["stabilizes"].as_bool(), Some(true));
    assert!((r["margin"].as_f64().unwrap() - 1.0 / 10f64.sqrt()).abs() < 1e-9);
    let r = result(&nugap(&[&"margin", &delay, &zero]));
    assert_eq!(r["stabilizes"].as_bool(), Some(false));
    assert_eq!(r["margin"].as_f64(), Some(0.0));
}

#[test]
fn factorize_and_winding() {
    let dir = tempfile::tempdir().unwrap();
    let delay = write(dir.path(), "delay.json", &siso("[1.0]", "[0.0, 1.0]"));
    let out = nugap(&[&"factorize", &delay]);
    assert_eq!(out.status.code(), Some(0));
    let r = result(&out);
    assert!(r["right"]["bezout_residual"].as_f64().unwrap() < 1e-8);
    assert!(r["right"]["residual_norm"].as_f64().unwrap() < 1e-10);

    let shifted = write(dir.path(), "shifted.json", &siso("[-0.5, 1.0]", "[1.0]"));
    let r = result(&nugap(&[&"winding", &shifted]));
    assert_eq!(r["winding"].as_i64(), Some(1));
}

#[test]
fn plot_files_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", &siso("[0.5]", "[-0.3, 1.0]"));
    let b = write(dir.path(), "b.json", &siso("[0.6]", "[-0.3, 1.0]"));
    let csv = dir.path().join("gap.csv");
    let out = nugap(&[&"numetric", &a, &b, &"--grid", &"128", &"--plot", &csv]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta,sigma_max,abs_det,arg_det"));
    assert_eq!(lines.count(), 128);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", &siso("[1.0]", r#"[1.0, "x"]"#));
    let out = nugap(&[&"winding", &bad]);
    assert_eq!(out.status.code(), Some(2));
    let diag: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(diag["error"], "Parse");
    assert_eq!(diag["pointer"], "/entries/0/0/den/1");

    let missing = dir.path().join("missing.json");
    assert_eq!(nugap(&[&"winding", &missing]).status.code(), Some(2));

    let scalar = write(dir.path(), "s.json", &siso("[1.0]", "[1.0]"));
    let wide = write(
        dir.path(),
        "w.json",
        r#"{"schema_version": "1.0", "kind": "matrix", "entries": [[{"num": [1.0], "den": [1.0]}, {"num": [], "den": [1.0]}]]}"#,
    );
    let out = nugap(&[&"numetric", &scalar, &wide]);
    assert_eq!(out.status.code(), Some(2));

    // a pole on the circle makes the document invalid
    let marginal = write(dir.path(), "m.json", &siso("[1.0]", "[-1.0, 1.0]"));
    let out = nugap(&[&"factorize", &marginal]);
    assert_eq!(out.status.code(), Some(2));
    let diag: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(diag["pointer"], "/entries");

    // a zero on the circle is a numerical failure
    let vanishing = write(dir.path(), "v.json", &siso("[-1.0, 1.0]", "[1.0]"));
    let out = nugap(&[&"winding", &vanishing]);
    assert_eq!(out.status.code(), Some(3));
    let diag: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(diag["error"], "NotInvertible");

    let out = nugap(&[&"report", &"--seed", &"3", &"--triples", &"8", &"--json-only"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(result(&out)["pass"].as_bool(), Some(true));
}
