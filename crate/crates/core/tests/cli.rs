use std::path::Path;
use std::process::{Command, Output};

const ENV: &str = "space X = {1,2} fail 0\na = {(1,0),(1,1),(2,2),(0,0)}\nb = {(1,1),(2,2),(0,0)}\nc = {(1,2),(2,0),(0,0)}\n";
const ALGEBRA: &str = "elements 0 a\norder 0<=a\nprod 0 0 = 0\nprod 0 a = 0\nprod a 0 = 0\nprod a a = a\nzero 0\n";

fn relic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relic")).args(args).env_remove("RELIC_BUDGET").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn relation_terms_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let env = write(dir.path(), "env.txt", ENV);
    let o = relic(&["rel", "eval", "--env", &env, "--term", "a ; c"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("{(1,2),(1,0),(2,0),(0,0)}"), "{}", stdout(&o));
}

#[test]
fn hoare_exit_code_follows_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let env = write(dir.path(), "env.txt", ENV);
    let holds = relic(&["hoare", "check", "--env", &env, "--triple", "{1} b {1}", "--mode", "total"]);
    assert_eq!(code(&holds), 0);
    let fails = relic(&["hoare", "check", "--env", &env, "--triple", "{1} a;b {1,2}", "--mode", "total"]);
    assert_eq!(code(&fails), 1);
    let partial = relic(&["hoare", "check", "--env", &env, "--triple", "{1} a;b {1,2}", "--mode", "partial"]);
    assert_eq!(code(&partial), 0);
}

#[test]
fn law_presets_and_counterexamples() {
    assert_eq!(code(&relic(&["law", "check", "--preset", "eq-valn", "--n", "2", "--size", "2"])), 0);
    let o = relic(&["law", "check", "--formula", "x;y = y;x", "--size", "2"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("counterexample"));
    let o = relic(&["law", "check", "--formula", "x;(y;z) = (x;y);z", "--size", "2", "--output", "structured"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).lines().next().unwrap()).unwrap();
    assert_eq!(v["verdict"], "valid");
}

#[test]
fn formula_files_report_the_failing_line() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "laws.txt", "# laws\nx;y = y;x\n\nx ; = y\n");
    let o = relic(&["law", "check", "--formula", &f]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("laws.txt:4:"), "{err}");
}

#[test]
fn representations_build_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let alg = write(dir.path(), "alg.txt", ALGEBRA);
    for c in ["zareckii", "weak-zero", "zero"] {
        assert_eq!(code(&relic(&["repr", "verify", "--algebra", &alg, "--construction", c])), 0, "{c}");
    }
    let built = relic(&["repr", "build", "--algebra", &alg, "--construction", "zero"]);
    assert_eq!(code(&built), 0);
    let rep = write(dir.path(), "rep.txt", &stdout(&built));
    let ok = relic(&["repr", "verify", "--algebra", &alg, "--rep", &rep, "--signature", "; <= 0=empty"]);
    assert_eq!(code(&ok), 0, "{}", stdout(&ok));
    let swapped = write(dir.path(), "bad.txt", "space X = {1}\n0 = {(1,1)}\na = {}\n");
    assert_eq!(code(&relic(&["repr", "verify", "--algebra", &alg, "--rep", &swapped, "--signature", "<="])), 1);
}

#[test]
fn algebra_membership_and_enumeration() {
    let dir = tempfile::tempdir().unwrap();
    let alg = write(dir.path(), "alg.txt", ALGEBRA);
    assert_eq!(code(&relic(&["algebra", "check", "--algebra", &alg, "--class", "zero"])), 0);
    assert_eq!(code(&relic(&["algebra", "check", "--algebra", &alg, "--class", "dual_zero"])), 1);
    let o = relic(&["algebra", "enumerate", "--class", "ordered_semigroup", "--size", "2"]);
    assert!(stdout(&o).starts_with("# 12 algebras"), "{}", stdout(&o));
}

#[test]
fn game_verify_and_replay() {
    assert_eq!(code(&relic(&["game", "verify", "--n", "3"])), 0);
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.txt");
    let t = trace.to_str().unwrap();
    assert_eq!(code(&relic(&["game", "play", "--n", "3", "--trace", t])), 0);
    assert_eq!(code(&relic(&["game", "replay", t])), 0);
    let tampered = std::fs::read_to_string(&trace).unwrap().replace("gave-up after 1", "gave-up after 2");
    let bad = write(dir.path(), "bad.txt", &tampered);
    assert_eq!(code(&relic(&["game", "replay", &bad])), 2);
}

#[test]
fn game_search_reports_unknown_within_depth() {
    let o = relic(&["game", "search", "--an", "3", "--universe", "s0 s1 s2 s3 t", "--depth", "2"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("unknown"));
    let tight = relic(&["--budget", "5", "game", "search", "--an", "3", "--universe", "s0 s1 s2 s3 t", "--depth", "3"]);
    assert_eq!(code(&tight), 3, "{}", stdout(&tight));
}

#[test]
fn bad_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.txt", "garbage\n");
    let o = relic(&["algebra", "check", "--algebra", &bad]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8(o.stderr).unwrap().contains("bad.txt:1:1"));
    assert_eq!(code(&relic(&["--budget", "0", "game", "verify", "--n", "3"])), 2);
}
