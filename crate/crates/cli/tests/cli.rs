//! End-to-end tests against the built binary: output formats, exit codes,
//! and the emit-cnf -> count pipeline.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_qcount")
}

fn tmp(name: &str) -> PathBuf {
    Path::new(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn write_fixture(name: &str, text: &str) -> PathBuf {
    let path = tmp(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(bin()).args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn result_field<'a>(stdout: &'a str, key: &str) -> &'a str {
    let line = stdout
        .lines()
        .find(|l| l.starts_with("RESULT "))
        .expect("RESULT line present");
    line.split_whitespace()
        .find_map(|kv| kv.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("field {key} in '{line}'"))
}

#[test]
fn simulate_hadamard() {
    let h = write_fixture("h.qasm", "OPENQASM 2.0;\nqreg q[1];\nh q[0];\n");
    let (code, stdout, _) = run(&["simulate", h.to_str().unwrap(), "--measure", "0"]);
    assert_eq!(code, 0);
    assert_eq!(stdout.lines().next().unwrap(), "5.00000000000e-1");
    assert_eq!(result_field(&stdout, "probability"), "5.00000000000e-1");
}

#[test]
fn equiv_verdicts_and_exit_codes() {
    let tt = write_fixture("tt.qasm", "qreg q[1];\nt q[0];\nt q[0];\n");
    let s = write_fixture("s.qasm", "qreg q[1];\ns q[0];\n");
    let (code, stdout, _) = run(&["equiv", tt.to_str().unwrap(), s.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.lines().next().unwrap().contains("equivalent=true"));
    assert!(stdout.lines().next().unwrap().starts_with("fidelity="));

    let t = write_fixture("t.qasm", "qreg q[1];\nt q[0];\n");
    let (code, stdout, _) = run(&["equiv", t.to_str().unwrap(), s.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(stdout.lines().next().unwrap().contains("equivalent=false"));
}

#[test]
fn verify_verdicts_and_exit_codes() {
    let c = write_fixture(
        "anc.qasm",
        "qreg q[2];\ncx q[0],q[1];\nt q[0];\ncx q[0],q[1];\n",
    );
    let (code, stdout, _) =
        run(&["verify", c.to_str().unwrap(), "--pre", "[1:0]", "--post", "[1:0]"]);
    assert_eq!(code, 0);
    assert_eq!(stdout.lines().next().unwrap(), "True");

    let (code, stdout, _) =
        run(&["verify", c.to_str().unwrap(), "--pre", "[1:0]", "--post", "[1:1]"]);
    assert_eq!(code, 1);
    assert_eq!(stdout.lines().next().unwrap(), "False");

    let (code, stdout, _) = run(&[
        "verify",
        c.to_str().unwrap(),
        "--pre",
        "[1:0]",
        "--post",
        "[1:0]",
        "--two-counts",
    ]);
    assert_eq!(code, 0);
    assert_eq!(stdout.lines().next().unwrap(), "True");
}

#[test]
fn synth_prints_circuit_and_summary() {
    let s = write_fixture("synth_s.qasm", "qreg q[1];\ns q[0];\n");
    let (code, stdout, _) =
        run(&["synth", s.to_str().unwrap(), "--gates", "H,T", "--max-depth", "4"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("t q[0];\nt q[0];\n"));
    let summary = stdout.lines().find(|l| l.starts_with("depth=")).unwrap();
    assert!(summary.contains("depth=2"));
    assert!(summary.contains("iterations=2"));
    assert_eq!(result_field(&stdout, "success"), "true");

    // depth exhausted: negative verdict
    let (code, _, _) =
        run(&["synth", s.to_str().unwrap(), "--gates", "H,T", "--max-depth", "1"]);
    assert_eq!(code, 1);
}

#[test]
fn synth_exports_maxcnf() {
    let s = write_fixture("synth_s2.qasm", "qreg q[1];\ns q[0];\n");
    let out = tmp("export.maxcnf");
    let (code, _, _) = run(&[
        "synth",
        s.to_str().unwrap(),
        "--gates",
        "H,T",
        "--max-depth",
        "3",
        "--export-maxcnf",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("c t wmc\n"));
    // depth 2 instance: two one-hot groups of three selectors
    assert_eq!(text.lines().filter(|l| l.starts_with("c max ")).count(), 6);
}

#[test]
fn emit_cnf_then_count_reproduces_engine_value() {
    let bell = write_fixture("bell.qasm", "qreg q[2];\nh q[0];\ncx q[0],q[1];\n");
    let (code, stdout, _) =
        run(&["simulate", bell.to_str().unwrap(), "--measure", "1I"]);
    assert_eq!(code, 0);
    let engine_re = result_field(&stdout, "re").to_string();
    let engine_im = result_field(&stdout, "im").to_string();

    let wcnf = tmp("bell.wcnf");
    let (code, stdout, _) = run(&[
        "simulate",
        bell.to_str().unwrap(),
        "--measure",
        "1I",
        "--emit-cnf",
        wcnf.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(stdout.contains("emitted="));

    let (code, stdout, _) = run(&["count", wcnf.to_str().unwrap()]);
    assert_eq!(code, 0);
    // bit-identical counts, compared through the 17-significant-digit format
    assert_eq!(result_field(&stdout, "re"), engine_re);
    assert_eq!(result_field(&stdout, "im"), engine_im);
    let first = stdout.lines().next().unwrap();
    assert_eq!(first, format!("{engine_re} {engine_im}"));
}

#[test]
fn encode_defaults_to_identity_spec() {
    let bell = write_fixture("bell2.qasm", "qreg q[2];\nh q[0];\ncx q[0],q[1];\n");
    let wcnf = tmp("bell2.wcnf");
    let (code, _, _) =
        run(&["encode", bell.to_str().unwrap(), "-o", wcnf.to_str().unwrap()]);
    assert_eq!(code, 0);
    let (code, stdout, _) = run(&["count", wcnf.to_str().unwrap()]);
    assert_eq!(code, 0);
    // <0|Cdag C|0> = 1
    let re: f64 = result_field(&stdout, "re").parse().unwrap();
    assert!((re - 1.0).abs() <= 1e-9);
}

#[test]
fn solver_flag_bruteforce_agrees() {
    let h = write_fixture("h2.qasm", "qreg q[1];\nh q[0];\n");
    let (_, dpll, _) = run(&["simulate", h.to_str().unwrap(), "--measure", "0"]);
    let (_, brute, _) = run(&[
        "simulate",
        h.to_str().unwrap(),
        "--measure",
        "0",
        "--solver",
        "bruteforce",
    ]);
    assert_eq!(result_field(&dpll, "re"), result_field(&brute, "re"));
}

#[test]
fn gate_defs_are_usable_everywhere() {
    let defs = write_fixture(
        "defs.txt",
        "sqz 1\n1,0 0,0\n0,0 0.7071067811865476,0.7071067811865476\n",
    );
    let c = write_fixture("custom.qasm", "qreg q[1];\nx q[0];\nsqz q[0];\nsqzdg q[0];\n");
    let (code, stdout, _) = run(&[
        "simulate",
        c.to_str().unwrap(),
        "--measure",
        "1",
        "--gate-defs",
        defs.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{stdout}");
    let p: f64 = result_field(&stdout, "probability").parse().unwrap();
    assert!((p - 1.0).abs() <= 1e-9);
}

#[test]
fn usage_and_input_errors_exit_two() {
    let (code, _, _) = run(&["frobnicate"]);
    assert_eq!(code, 2);
    let (code, _, stderr) = run(&["simulate", "/nonexistent.qasm", "--measure", "0"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("error"));
    let h = write_fixture("h3.qasm", "qreg q[1];\nh q[0];\n");
    let (code, _, _) = run(&["simulate", h.to_str().unwrap(), "--measure", "2"]);
    assert_eq!(code, 2);
    let bad = write_fixture("bad.qasm", "qreg q[1];\nmeasure q[0] -> c[0];\n");
    let (code, _, stderr) = run(&["simulate", bad.to_str().unwrap(), "--measure", "0"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("measurement"), "{stderr}");
}
