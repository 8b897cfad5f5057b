use std::process::{Command, Output};

use serde_json::Value;

fn nibsym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nibsym"))
        .args(args)
        .env_remove("NIBSYM_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn translation_is_a_symmetry() {
    let out = nibsym(&["verify", "--f", "Phi(u)", "--g", "Psi(u)", "--vf", r#"{"x":"1"}"#, "--format", "json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verification"]["verdict"], "proven-symmetry");
}

#[test]
fn non_symmetry_exits_one() {
    let out = nibsym(&["verify", "--f", "Phi(u)", "--g", "Psi(u)", "--vf", r#"{"u":"1"}"#]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stdout).contains("residual"));
}

#[test]
fn bad_input_exits_two() {
    let out = nibsym(&["verify", "--f", "Phi(", "--g", "Psi(u)", "--vf", r#"{"x":"1"}"#]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    assert_eq!(code(&nibsym(&["verify", "--f", "u", "--vf", r#"{"x":"1"}"#])), 2);
    assert_eq!(code(&nibsym(&["table", "adjoint", "--algebra", "ibe"])), 2);
    assert_eq!(code(&nibsym(&["frobnicate"])), 2);
}

#[test]
fn bracket_of_translation_and_scaling() {
    let out = nibsym(&["bracket", "--v", r#"{"x":"1"}"#, "--w", r#"{"x":"x"}"#]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "[`∂x`, `x∂x`] = `∂x`");
}

#[test]
fn failing_row_exits_one() {
    let out = nibsym(&["classify", "row", "23", "--format", "json"]);
    assert_eq!(code(&out), 1);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["status"], "fail");
}

#[test]
fn classification_report_is_deterministic() {
    let a = nibsym(&["classify", "report", "--format", "json"]);
    let b = nibsym(&["classify", "report", "--format", "json"]);
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 27);
}

#[test]
fn commutator_table_markdown() {
    let out = nibsym(&["table", "commutators", "--algebra", "equiv", "--compare-paper"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# Commutator table"));
    assert!(text.contains("| "));
}

#[test]
fn out_dir_receives_the_report() {
    let dir = std::env::temp_dir().join(format!("nibsym-cli-{}", std::process::id()));
    let out = Command::new(env!("CARGO_BIN_EXE_nibsym"))
        .args(["optimal-system", "list", "--format", "json"])
        .env("NIBSYM_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let path = dir.join("optimal-system.json");
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(String::from_utf8_lossy(&out.stdout).contains("optimal-system.json"));
    assert!(v.is_object());
    std::fs::remove_dir_all(&dir).unwrap();
}
