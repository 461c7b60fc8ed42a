use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mucheck")).args(args).current_dir(corpus()).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn check_accepts_the_bundled_theory() {
    let o = run(&["check", "natbool.mlt"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("ok (2 sorts, 8 symbols, 15 axioms)"), "{}", stdout(&o));
}

#[test]
fn check_reports_positioned_errors() {
    let o = run(&["check", "errors/dangling-bound.mlt"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("errors/dangling-bound.mlt:7:16: error[index-out-of-scope]"), "{}", stderr(&o));
}

#[test]
fn missing_file_exits_2() {
    let o = run(&["check", "no-such-file.mlt"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn violated_axiom_exits_1_with_witness() {
    let o = run(&["satisfies", "natbool.mlt", "natbool-wrap.mlm"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("isZero-S"), "{out}");
    assert!(out.contains("witness:"), "{out}");
    assert!(out.contains("1 violated"), "{out}");
}

#[test]
fn json_report_is_machine_readable() {
    let o = run(&["satisfies", "natbool.mlt", "natbool-wrap.mlm", "--report", "json", "--axiom", "isZero-S"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("\"satisfied\": false"), "{out}");
    assert!(out.contains("\"verdict\": \"violated\""), "{out}");
}

#[test]
fn unknown_axiom_label_is_rejected() {
    let o = run(&["satisfies", "natbool.mlt", "natbool.mlm", "--axiom", "nope"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("no axiom labeled `nope`"));
}

#[test]
fn eval_with_bindings_and_prefix_engine() {
    let o = run(&["eval", "natbool.mlt", "natbool.mlm", "S(n:Nat)", "-v", "n:Nat=2", "--lfp", "prefix"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "{ 3 }");
    let o = run(&["eval", "natbool.mlt", "natbool.mlm", "S(#N:Nat)", "-V", "N:Nat={0,1}"]);
    assert_eq!(stdout(&o).trim(), "{ 1, 2 }");
}
