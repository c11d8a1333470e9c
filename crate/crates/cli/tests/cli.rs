use std::path::PathBuf;
use std::process::{Command, Output};

fn rules_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../rules")
}

fn dill(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dill"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = dill(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn rule(name: &str) -> String {
    rules_dir().join(name).to_string_lossy().into_owned()
}

#[test]
fn dist_values() {
    assert_eq!(stdout(&["dist", "000", "111", "--metric", "levenshtein"]), "3\n");
    assert_eq!(stdout(&["dist", "ab", "ab", "--metric", "hamming"]), "0\n");
    assert_eq!(stdout(&["dist", "abba", "baab", "--metric", "levenshtein"]), "2\n");
    assert_eq!(stdout(&["dist", "ab", "a", "--metric", "levenshtein"]), "1/2\n");
    assert_eq!(
        stdout(&[
            "dist",
            "periodic:ab",
            "periodic:aa",
            "--metric",
            "cantor",
            "--budget",
            "8"
        ]),
        "1/2\n"
    );
    assert_eq!(
        stdout(&["dist", "ab", "ab", "--metric", "cantor"]),
        "zero-at-budget(64)\n"
    );
}

#[test]
fn hamming_length_mismatch_fails() {
    let out = dill(&["dist", "ab", "a", "--metric", "hamming"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("equal lengths"));
}

fn verdicts(file: &str) -> (String, String, String, String) {
    let doc: serde_json::Value = serde_json::from_str(&stdout(&["classify", &rule(file)])).unwrap();
    let s = |v: &serde_json::Value| v.as_str().unwrap().to_string();
    (
        s(&doc["weyl_h"]["verdict"]),
        s(&doc["weyl_l"]["verdict"]),
        s(&doc["cycle_means"]["min"]),
        s(&doc["cycle_means"]["max"]),
    )
}

#[test]
fn classify_named_rules() {
    let owned = |a: &str, b: &str, c: &str, d: &str| (a.to_string(), b.to_string(), c.to_string(), d.to_string());
    assert_eq!(verdicts("xor.rule"), owned("WellDefined", "WellDefined", "1", "1"));
    assert_eq!(
        verdicts("fibonacci.rule"),
        owned("NotWellDefined", "NotWellDefined", "1", "2")
    );
    assert_eq!(
        verdicts("diamond.rule"),
        owned("NotWellDefined", "WellDefined", "2", "2")
    );
}

#[test]
fn classify_is_deterministic() {
    let a = stdout(&["classify", &rule("tau011.rule")]);
    let b = stdout(&["classify", &rule("tau011.rule")]);
    assert_eq!(a, b);
}

#[test]
fn malformed_rule_reports_line() {
    let path = std::env::temp_dir().join(format!("dill-bad-{}.rule", std::process::id()));
    std::fs::write(&path, "alphabet: ab\ndiameter: 1\na -> ab\nb ->\n").unwrap();
    let out = dill(&["classify", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert!(!out.status.success());
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("line 4"),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn witness_for_doubling() {
    assert_eq!(stdout(&["witness", &rule("tau011.rule")]), "u\t0\nv\t1\nalpha\t-1\n");
    assert!(stdout(&["witness", &rule("diamond.rule")]).starts_with("no witness"));
    let h = stdout(&["witness", &rule("fibonacci.rule"), "--space", "weyl-h"]);
    assert!(h.contains("x\tevp:a|a\ny\tevp:b|a"), "{h}");
}

#[test]
fn pseudo_tsv_and_json() {
    let tsv = stdout(&["pseudo", "ab", "ba", "--ell", "16", "--K", "64"]);
    assert!(tsv.starts_with("ell\tK\tvalue_num\tvalue_den\n16\t64\t1\t1\n"), "{tsv}");
    let l = stdout(&[
        "pseudo",
        "ab",
        "ba",
        "--ell",
        "16",
        "--K",
        "64",
        "--metric",
        "levenshtein",
        "--json",
    ]);
    let doc: serde_json::Value = serde_json::from_str(&l).unwrap();
    assert_eq!(doc["entries"][0]["value_num"], 1);
    assert_eq!(doc["entries"][0]["value_den"], 16);
    let img = stdout(&[
        "pseudo",
        "a",
        "evp:b|a",
        "--rule",
        &rule("fibonacci.rule"),
        "--ell",
        "8,32",
    ]);
    assert!(img.contains("8\t32\t1\t1\n32\t128\t1\t1\n"), "{img}");
}

#[test]
fn reproduce_examples() {
    let out = stdout(&["reproduce", "tau011-weylL", "--ell", "6"]);
    assert!(out.contains("111111 / 000000"));
    assert!(out.contains("image d_L ell=6 k=57\texpected 6\tobserved 6"));
    let xor = stdout(&["reproduce", "xor-compose"]);
    for row in [
        "tau o f(aa)\texpected ab\tobserved ab",
        "tau o f(ba)\texpected a\tobserved a",
    ] {
        assert!(xor.contains(row), "{xor}");
    }
    stdout(&["reproduce", "fibonacci-weyl", "--ell", "16"]);
}

#[test]
fn reproduce_unknown_id() {
    let out = dill(&["reproduce", "nope"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("fibonacci-weyl") && err.contains("shift-jump"));
}

#[test]
fn verify_suites_exit_zero() {
    let out = stdout(&["verify", "--suite", "distances", "--seed", "3"]);
    assert!(out.lines().all(|l| !l.starts_with("FAIL")));
    stdout(&["verify", "--suite", "theorems", "--seed", "3", "--n-rules", "10"]);
}

#[test]
fn bare_configuration_forms() {
    let evp = stdout(&["pseudo", "a", "b|a", "--ell", "4"]);
    assert!(evp.contains("4\t16\t1\t4"), "{evp}");
    let word = stdout(&["pseudo", "a", "b!a", "--ell", "4", "--rule", &rule("fibonacci.rule")]);
    assert!(word.contains("4\t16\t1\t1"), "{word}");
}
