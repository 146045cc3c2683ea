use std::path::{Path, PathBuf};
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_kitemorph");

fn corpus(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(rel)
}

fn run(args: &[&Path]) -> (i32, String) {
    let out = Command::new(BIN).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn p(s: &str) -> &Path {
    Path::new(s)
}

#[test]
fn validate_exit_codes() {
    assert_eq!(run(&[p("validate"), &corpus("k4/a.json")]).0, 0);
    assert_eq!(run(&[p("validate"), &corpus("invalid/p3_witness.json")]).0, 1);
    assert_eq!(run(&[p("validate"), &corpus("invalid/malformed.json")]).0, 2);
    assert_eq!(run(&[p("validate"), &corpus("does/not/exist.json")]).0, 2);
}

#[test]
fn equivalent_reports_mirrored_pair() {
    assert_eq!(run(&[p("equivalent"), &corpus("k4/a.json"), &corpus("k4/b.json")]).0, 0);
    assert_eq!(run(&[p("equivalent"), &corpus("mirrored/a.json"), &corpus("mirrored/b.json")]).0, 1);
}

#[test]
fn morph_is_deterministic_and_renders() {
    let dir = tempfile::tempdir().unwrap();
    let (m1, m2) = (dir.path().join("m1.json"), dir.path().join("m2.json"));
    let (a, b) = (corpus("fig1_two_level/a.json"), corpus("fig1_two_level/b.json"));
    for m in [&m1, &m2] {
        assert_eq!(run(&[p("morph"), &a, &b, p("-o"), m]).0, 0);
    }
    assert_eq!(std::fs::read(&m1).unwrap(), std::fs::read(&m2).unwrap());

    let frames = dir.path().join("frames.json");
    assert_eq!(run(&[p("sample"), &m1, p("-o"), &frames, p("--frames"), p("20")]).0, 0);
    assert_eq!(run(&[p("verify"), &a, &b, &frames]).0, 0);
    assert_eq!(run(&[p("verify"), &a, &b, &a]).0, 2);

    let svg = dir.path().join("out.svg");
    assert_eq!(run(&[p("render"), &m1, p("-o"), &svg, p("--frames"), p("10")]).0, 0);
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg") || text.starts_with("<?xml"));
    assert!(text.contains("<animate"));
}
