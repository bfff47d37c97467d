use std::fs;
use std::io::Write;
use std::os::unix::fs::PermissionsExt;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use tempfile::TempDir;

const M2: &str = "states: qI qF\ninit: qI\nhalt: qF\ntrans: qI 0 -> qF 1 R\ntrans: qI 1 -> qF 1 R\n";
const LOOP: &str = "states: qI qF\ninit: qI\nhalt: qF\ntrans: qI 0 -> qI 0 R\ntrans: qI 1 -> qI 1 R\n";
const BOUNDED_GAP: &str = "(forall (x) (exists (y) (and (> (- y x) 0) (< (- y x) 3) (P y))))";
const GUARDED: &str = "(forall (x y) (=> (and (int x) (int y)) (<= (- x y) 2)))";

fn rdlmix(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_rdlmix"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn script(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = write(dir, name, &format!("#!/bin/sh\ncat > /dev/null\n{body}\n"));
    fs::set_permissions(&p, fs::Permissions::from_mode(0o755)).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn classify_bounded_gap_example() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "gap.f", BOUNDED_GAP);
    let o = rdlmix(&["classify", s(&f)], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("RDL_UUP"));
}

#[test]
fn parse_echoes_canonical_form_from_stdin() {
    let o = rdlmix(&["parse"], Some("(forall (x)\n   (P x))  ; comment\n"));
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "(forall (x) (P x))");
    let again = rdlmix(&["parse", "-"], Some(&stdout(&o)));
    assert_eq!(stdout(&again), stdout(&o));
}

#[test]
fn parse_error_exits_two() {
    let o = rdlmix(&["parse"], Some("(and (P x)"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("parse error"));
}

#[test]
fn missing_file_exits_two() {
    let o = rdlmix(&["classify", "/nonexistent/input.f"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cannot read"));
}

#[test]
fn translate_output_is_order_only() {
    let o = rdlmix(&["translate-lmix"], Some(GUARDED));
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("; integer predicate Pint\n"));
    let labels = rdlmix(&["classify"], Some(&text));
    assert!(stdout(&labels).starts_with("MSO_OR"), "{}", stdout(&labels));
}

#[test]
fn translate_rejects_unguarded() {
    let o = rdlmix(&["translate-lmix"], Some("(< (- x y) 1)"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not in LMIX"));
}

#[test]
fn compile_respects_head_fix_flag() {
    let fixed = stdout(&rdlmix(&["compile-tm"], Some(M2)));
    let printed = stdout(&rdlmix(&["compile-tm", "--no-head-fix"], Some(M2)));
    assert_ne!(fixed, printed);
    assert!(fixed.contains("(= (- "));
    assert!(stdout(&rdlmix(&["classify"], Some(&fixed))).starts_with("RDL_UUP"));
}

#[test]
fn simulate_reports_halting() {
    let o = rdlmix(&["simulate-tm"], Some(M2));
    assert!(stdout(&o).ends_with("halted after 1 steps\n"));
    let o = rdlmix(&["simulate-tm", "--bound", "5"], Some(LOOP));
    assert!(stdout(&o).ends_with("no halt within 5 steps\n"));
    assert_eq!(stdout(&o).lines().count(), 7);
}

#[test]
fn check_model_on_intended_model() {
    let dir = TempDir::new().unwrap();
    let tm = write(&dir, "m2.tm", M2);
    let o = rdlmix(&["check-model", "--tm", s(&tm)], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "START ok\nSTEP ok\nEND ok\nHEAD ok\nAXIOMS 1-7 ok\n");
}

#[test]
fn check_model_from_dump_file() {
    let dir = TempDir::new().unwrap();
    let tm = write(&dir, "m2.tm", M2);
    let model = dir.path().join("m2.model");
    let o = rdlmix(&["build-model", s(&tm), "-o", s(&model)], None);
    assert_eq!(o.status.code(), Some(0));
    let o = rdlmix(&["check-model", "--model", s(&model), "--tm", s(&tm)], None);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn non_halting_machine_fails_check() {
    let dir = TempDir::new().unwrap();
    let tm = write(&dir, "loop.tm", LOOP);
    let o = rdlmix(&["check-model", "--tm", s(&tm), "--bound", "20"], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("END FAILED"));
    assert!(stdout(&o).contains("AXIOMS 1-7 ok"));
}

#[test]
fn corrupted_dump_fails_axioms() {
    let o = rdlmix(&["build-model", "--bits", "3"], None);
    let dump = stdout(&o).replace("prefix=in", "prefix=out");
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "bad.model", &dump);
    let o = rdlmix(&["check-model", "--model", s(&model)], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("AXIOM 3 FAILED"));
}

#[test]
fn depth_below_four_is_usage_error() {
    let o = rdlmix(&["build-model", "--bits", "3", "--depth", "3"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn emit_smt_script() {
    let o = rdlmix(&["emit-smt", "--tm"], Some(M2));
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("(set-logic UFLRA)\n"));
    assert!(text.ends_with("(check-sat)\n"));
    let closed = stdout(&rdlmix(&["emit-smt", "--close-free"], Some("(P x)")));
    assert!(!closed.contains("declare-const"));
}

#[test]
fn solve_without_solver_degrades_to_emit() {
    let o = rdlmix(&["solve", "--solver", "/nonexistent/solver"], Some("(P x)"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("solver executable not found"));
    assert!(stdout(&o).contains("(check-sat)"));
}

#[test]
fn solve_reports_verdict_and_timeout() {
    let dir = TempDir::new().unwrap();
    let unsat = script(&dir, "fake-unsat", "echo unsat");
    let o = rdlmix(&["solve", "--solver", s(&unsat)], Some("(P x)"));
    assert_eq!((o.status.code(), stdout(&o)), (Some(0), "unsat\n".to_string()));
    let slow = script(&dir, "fake-slow", "sleep 30");
    let o = rdlmix(&["solve", "--solver", s(&slow), "--timeout", "1"], Some("(P x)"));
    assert_eq!((o.status.code(), stdout(&o)), (Some(0), "timeout\n".to_string()));
    let broken = script(&dir, "fake-broken", "echo '(error \"bad\")'");
    let o = rdlmix(&["solve", "--solver", s(&broken)], Some("(P x)"));
    assert_eq!(o.status.code(), Some(1));
}
