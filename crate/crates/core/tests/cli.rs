use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_groupoid-calc"));
    c.env_remove("GROUPOID_CALC_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

fn report(args: &[&str]) -> Value {
    serde_json::from_slice(&run(args).stdout).expect("json report")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("groupoid-calc-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn exit_codes_follow_verdicts() {
    assert_eq!(code(&["validate"]), 0);
    assert_eq!(code(&["essential-eq", "q"]), 0);
    assert_eq!(code(&["essential-eq", "c"]), 1);
    assert_eq!(code(&["w-check", "c", "--depth", "8"]), 0);
    assert_eq!(code(&["w-check", "collapse"]), 1);
    assert_eq!(code(&["has-section", "double-cover"]), 0);
    assert_eq!(code(&["has-section", "inv-double-cover"]), 1);
    assert_eq!(code(&["homotopy-check", "tau-central"]), 0);
    assert_eq!(code(&["homotopy-check", "tau-to-collapse"]), 1);
    assert_eq!(code(&["compare-pi1", "ROT"]), 0);
    assert_eq!(code(&["bf-suite"]), 0);
}

#[test]
fn malformed_input_exits_3() {
    assert_eq!(code(&["no-such-command"]), 3);
    assert_eq!(code(&["essential-eq", "missing"]), 3);
    assert_eq!(code(&["pi1", "PT2", "--basepoint", "nowhere"]), 3);
    let bad = scratch("dup.json");
    std::fs::write(&bad, r#"{"schema_version": 1, "graphs": {"X": {"vertices": ["a"]}, "X": {"vertices": ["b"]}}}"#)
        .unwrap();
    assert_eq!(code(&["--doc", bad.to_str().unwrap(), "validate"]), 3);
    let out = bin().env("GROUPOID_CALC_SEED", "not-a-number").arg("validate").output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn reports_carry_the_expected_values() {
    let r = report(&["essential-eq", "c"]);
    assert_eq!(r["verdict"], "no");
    let r = report(&["pi1", "PT2", "--basepoint", "star", "--abelianize"]);
    assert_eq!(r["invariant_factors"], serde_json::json!([2]));
    assert_eq!(r["abelianization"], "Z/2");
    let r = report(&["weak-pullback", "c", "id_PT2"]);
    assert_eq!(r["pullback"]["objects"], 6);
    assert_eq!(r["pullback"]["arrows"], 24);
}

#[test]
fn examples_round_trip_through_a_file() {
    let out = run(&["examples"]);
    assert!(out.status.success());
    let path = scratch("corpus.json");
    std::fs::write(&path, &out.stdout).unwrap();
    assert_eq!(code(&["--doc", path.to_str().unwrap(), "validate"]), 0);
    let again = run(&["--doc", path.to_str().unwrap(), "examples"]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn out_flag_writes_the_same_bytes() {
    let stdout = run(&["span-iso", "strict-q", "morita-q"]).stdout;
    let path = scratch("iso.json");
    let o = run(&["--out", path.to_str().unwrap(), "span-iso", "strict-q", "morita-q"]);
    assert_eq!(o.status.code(), run(&["span-iso", "strict-q", "morita-q"]).status.code());
    assert_eq!(std::fs::read(&path).unwrap(), stdout);
}

#[test]
fn repeated_runs_are_byte_identical() {
    for args in [&["bf-suite"][..], &["whp", "c", "id_PT2"], &["nerve-pi1", "REFL"], &["orbifold-report", "ROT"]] {
        assert_eq!(run(args).stdout, run(args).stdout, "{args:?}");
    }
}

#[test]
fn verdicts_do_not_depend_on_the_seed() {
    let cases: [&[&str]; 4] = [
        &["span-iso", "strict-q", "morita-q"],
        &["has-section", "inv-double-cover"],
        &["has-section", "double-cover"],
        &["essential-eq", "q"],
    ];
    for args in cases {
        let base = run(args);
        let verdict = |o: &Output| serde_json::from_slice::<Value>(&o.stdout).unwrap()["verdict"].clone();
        for seed in ["1", "7", "12345"] {
            let o = bin().env("GROUPOID_CALC_SEED", seed).args(args).output().unwrap();
            assert_eq!(o.status.code(), base.status.code(), "{args:?} seed {seed}");
            assert_eq!(verdict(&o), verdict(&base), "{args:?} seed {seed}");
        }
    }
}

#[test]
fn gpath_words_and_inverses() {
    let w = report(&["gpath", "REFL", "word", "(tau,0)"]);
    assert_eq!(w["result"], "[(tau,0)]");
    assert_eq!(code(&["gpath", "REFL", "validate", "(tau,0)"]), 0);
    assert_eq!(code(&["gpath", "REFL", "inverse", "(tau,0)"]), 0);
}
