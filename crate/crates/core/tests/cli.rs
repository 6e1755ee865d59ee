//! End-to-end runs of the `dispersive-lab` binary: exit codes and artifacts.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dispersive-lab"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn list_builtins_names_every_potential() {
    let o = run(&["list-builtins"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for name in ["free", "constant_a", "ab_flux", "paper_3d_example"] {
        assert!(text.contains(name), "{name} missing from\n{text}");
    }
}

#[test]
fn spectrum_prints_constants() {
    let o = run(&["spectrum", scenario("invsq_m316.json").to_str().unwrap(), "--clusters", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("nu0        0.25"), "{text}");
    assert!(text.contains("alpha      -0.25"));
    assert!(text.contains("p(alpha)   12"));
}

#[test]
fn passing_scenario_exits_zero_with_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ab");
    let o = run(&["run", scenario("ab_circle.json").to_str().unwrap(), "--out", out.to_str().unwrap(), "--threads", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in ["spectrum.json", "summary.txt", "runtime.json"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    assert!(std::fs::read_dir(out.join("reports")).unwrap().count() > 0);
    let summary = std::fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.contains("status     PASS"), "{summary}");
}

#[test]
fn failing_verdict_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["run", scenario("invsq_m316.json").to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let summary = std::fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert!(summary.contains("WARNING inconclusive"));
    assert!(summary.contains("status     FAIL"));
}

#[test]
fn malformed_json_exits_two_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\n  \"name\": \"x\",\n  \"n\": 3,,\n}\n").unwrap();
    let o = run(&["run", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("broken.json:3:"), "{err}");
}

#[test]
fn invalid_field_exits_two_with_path() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(scenario("free3d.json")).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    let mut value = value;
    value["grids"]["r_max"] = serde_json::json!(-1.0);
    let path = dir.path().join("neg.json");
    std::fs::write(&path, serde_json::to_string(&value).unwrap()).unwrap();
    let o = run(&["run", path.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("grids.r_max"), "{}", stderr(&o));
}

#[test]
fn non_positive_operator_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["run", scenario("bad_a.json").to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("strict positivity of P"), "{}", stderr(&o));
}

#[test]
fn missing_file_exits_four() {
    let o = run(&["run", "/nonexistent/scenario.json"]);
    assert_eq!(o.status.code(), Some(4));
}
