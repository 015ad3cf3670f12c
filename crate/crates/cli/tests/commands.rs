use std::io::Write;
use std::process::{Command, Output, Stdio};

fn lca(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lca")).args(args).output().expect("lca runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

#[test]
fn typecheck_takes_floors_of_each_scalar() {
    let out = lca(&["typecheck", "--ctx", "t:T", "0.9 . t + 1.1 . t"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "T");
}

#[test]
fn normalize_factors() {
    let out = lca(&["normalize", "0.9 . t + 1.1 . t"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "2 . t");
}

#[test]
fn trace_names_rules() {
    let out = lca(&["normalize", "--trace", "(\\x:X. x + x) y"]);
    let text = stdout(&out);
    assert!(text.contains("Beta"), "{text}");
    assert!(text.lines().last().unwrap().contains("2 . y"), "{text}");
}

#[test]
fn precedes_prints_witness_or_exits_one() {
    let out = lca(&["precedes", "T", "T+T"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("T <= T + T"));
    assert_eq!(lca(&["precedes", "T + T", "T"]).status.code(), Some(1));
}

#[test]
fn parse_round_trips() {
    for src in ["(\\x:X. x) y", "2 . f (x + y) + zero", "/\\Z. \\z:Z. z"] {
        let once = stdout(&lca(&["parse", src]));
        assert_eq!(stdout(&lca(&["parse", &once])), once);
    }
}

#[test]
fn exit_codes() {
    assert_eq!(lca(&["parse", "(x"]).status.code(), Some(2));
    assert_eq!(lca(&["typecheck", "x"]).status.code(), Some(1));
    let omega = "(\\x:X. x x) (\\x:X. x x)";
    assert_eq!(lca(&["normalize", "--fuel", "30", omega]).status.code(), Some(3));
}

#[test]
fn reads_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_lca"))
        .arg("abstract")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"2.5 . x + 0.5 . y").unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(stdout(&out), "x + x + zero");
}

#[test]
fn json_output() {
    let out = lca(&["--json", "normalize", "0.9 . t + 1.1 . t"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["normal"], "2 . t");
}

#[test]
fn squares_hold_on_a_redex() {
    for level in ["additive", "fp"] {
        let out = lca(&["square", "--level", level, "--ctx", "x:X", "(\\y:X. y + y) x"]);
        assert!(out.status.success(), "{level}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn translate_and_normalize_in_f() {
    let out = lca(&["translate", "--ctx", "f:X -> Y, x:X", "f x + f x"]);
    assert_eq!(stdout(&out), "(f x, f x) : Y * Y");
    let out = lca(&["fp-normalize", "--ctx", "x:X", "(\\y:X. y + y) x"]);
    assert_eq!(stdout(&out), "(x, x)");
}

#[test]
fn fuzz_explains_every_failure() {
    let out = lca(&["fuzz", "--samples", "20", "--seed", "3"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("unexplained failures: 0"));
}
