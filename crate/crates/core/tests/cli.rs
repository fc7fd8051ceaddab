use std::path::Path;
use std::process::Command;

fn valiant(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_valiant")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gen_reduce_verify_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let circ = dir.path().join("det3.circ");
    let proj = dir.path().join("det3.proj");
    assert_eq!(valiant(&["--field", "Fp:101", "gen", "det", "3", "-o", p(&circ)]).0, 0);
    assert!(dir.path().join("det3.circ.meta").exists());
    let (code, out) = valiant(&["--field", "Fp:101", "verify", &format!("{}.meta", p(&circ))]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(valiant(&["reduce", "det", p(&circ), "-o", p(&proj)]).0, 0);
    let (code, out) = valiant(&["verify", p(&proj)]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("passed true"));
}

#[test]
fn outputs_are_seed_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let circ = dir.path().join("per3.circ");
    assert_eq!(valiant(&["gen", "per", "3", "-o", p(&circ)]).0, 0);
    let a = valiant(&["--seed", "9", "reduce", "per", p(&circ)]);
    let b = valiant(&["--seed", "9", "reduce", "per", p(&circ)]);
    assert_eq!(a, b);
    assert_eq!(a.0, 0);
}

#[test]
fn exit_codes() {
    assert_eq!(valiant(&["no-such-command"]).0, 64);
    assert_eq!(valiant(&["stats", "/no/such/file"]).0, 2);
}
