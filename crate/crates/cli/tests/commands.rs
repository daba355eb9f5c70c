use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn polarint(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polarint"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const CUBIC: &str = r#"{"mode": "rational",
    "field": {"dimension": 1, "components": [[{"coeff": "1", "exponents": [3]}]]},
    "h": "1/4", "steps": STEPS, "window": [["1"], ["1"]]}"#;

const QUARTIC: &str = r#"{"mode": "MODE", "hamiltonian": {"dimension": 2, "monomials": [
    {"coeff": 1, "exponents": [4, 0]}, {"coeff": 2, "exponents": [2, 2]},
    {"coeff": 1, "exponents": [1, 3]}, {"coeff": "1/2", "exponents": [0, 4]}],
    "K": [[0, 1], [-1, 0]]},
    "h": "1/20", "steps": 8, "window": [["1", "1/2"], ["9/10", "3/5"]]EXTRA}"#;

fn quartic(mode: &str, extra: &str) -> String {
    QUARTIC.replace("MODE", mode).replace("EXTRA", extra)
}

fn report(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).expect("JSON report")
}

fn check<'a>(r: &'a Value, name: &str) -> &'a Value {
    r["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap()
}

#[test]
fn polarize_prints_worked_trilinear_terms() {
    let dir = TempDir::new().unwrap();
    let f = write(
        dir.path(),
        "f.json",
        r#"{"dimension": 3, "components": [[{"coeff": 3, "exponents": [2, 1, 0]}], [], []]}"#,
    );
    let o = polarint(&["polarize", "--config", &f]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("1 * (x0[1] x0[2] x1[3] + x0[1] x1[2] x0[3] + x1[1] x0[2] x0[3])"));
}

#[test]
fn polarize_zero_field_lists_nothing() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "zero.json", r#"{"dimension": 2, "components": [[], []]}"#);
    let o = polarint(&["polarize", "--config", &f]);
    assert!(o.status.success());
    assert!(!stdout(&o).contains('*'));
}

#[test]
fn polarize_nonhomogeneous_needs_flag() {
    let dir = TempDir::new().unwrap();
    let f = write(
        dir.path(),
        "g.json",
        r#"{"dimension": 1, "components": [[{"coeff": 1, "exponents": [2]}, {"coeff": 1, "exponents": [0]}]]}"#,
    );
    let o = polarint(&["polarize", "--config", &f]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--homogenize"));
    let o = polarint(&["polarize", "--config", &f, "--homogenize"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("auxiliary coordinate"));
}

#[test]
fn integrate_cubic_stops_at_singular_step() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "c.json", &CUBIC.replace("STEPS", "3"));
    let out = dir.path().join("t.csv");
    let o = polarint(&["integrate", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("singular"));
    assert_eq!(fs::read_to_string(&out).unwrap(), "step_index,t,x0\n0,0,1\n1,1/4,1\n2,1/2,2\n");
}

#[test]
fn zero_steps_write_the_window_only() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "c.json", &CUBIC.replace("STEPS", "0"));
    let o = polarint(&["integrate", "--config", &cfg]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "step_index,t,x0\n0,0,1\n1,1/4,1\n");
}

#[test]
fn window_size_is_checked_against_degree() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        &CUBIC.replace("STEPS", "3").replace(r#"[["1"], ["1"]]"#, r#"[["1"]]"#),
    );
    let o = polarint(&["integrate", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("field of degree 3"), "{}", stderr(&o));
}

#[test]
fn malformed_config_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "bad.json", r#"{"h": 1}"#);
    assert_eq!(polarint(&["integrate", "--config", &cfg]).status.code(), Some(1));
    assert_eq!(polarint(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn rational_quartic_verifies_exactly() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "q.json", &quartic("rational", ""));
    let o = polarint(&["verify", "--config", &cfg]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = report(&o);
    assert_eq!(r["schema"], 1);
    for name in ["k-integrals", "measure-jacobian", "self-adjoint", "scaling"] {
        let c = check(&r, name);
        assert_eq!(c["status"], "pass", "{name}");
        assert_eq!(c["max_residual"], 0.0, "{name}");
    }
    assert_eq!(check(&r, "oracle-equivalence")["status"], "skipped");
}

#[test]
fn leapfrog_control_is_expected_fail() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "q.json",
        r#"{"mode": "double", "hamiltonian": {"dimension": 2, "monomials": [
            {"coeff": 1, "exponents": [4, 0]}, {"coeff": 2, "exponents": [2, 2]},
            {"coeff": 1, "exponents": [1, 3]}, {"coeff": 0.5, "exponents": [0, 4]}],
            "K": [[0, 1], [-1, 0]]},
            "h": 0.05, "steps": 200, "initial": {"x": [1, 0.5]}, "leapfrog_control": true}"#,
    );
    let o = polarint(&["verify", "--config", &cfg]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = report(&o);
    assert_eq!(check(&r, "k-integrals")["status"], "pass");
    assert_eq!(check(&r, "k-integrals")["tolerance"], 1e-11);
    assert_eq!(check(&r, "k-integrals-leapfrog-control")["status"], "expected-fail");
    assert_eq!(check(&r, "measure-jacobian")["tolerance"], 1e-5);
}

#[test]
fn recorded_trajectory_reverifies_identically() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "q.json", &quartic("rational", ""));
    let out = dir.path().join("q.csv");
    assert!(polarint(&["integrate", "--config", &cfg, "--out", out.to_str().unwrap()]).status.success());
    let direct = stdout(&polarint(&["verify", "--config", &cfg]));
    let replay_cfg = write(dir.path(), "replay.json", &quartic("rational", r#", "trajectory_in": "q.csv""#));
    let replay = stdout(&polarint(&["verify", "--config", &replay_cfg]));
    assert_eq!(direct, replay);
}

#[test]
fn oracle_check_runs_for_scalar_power_field() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        &CUBIC.replace("STEPS", "10").replace(r#""1/4""#, r#""1/100""#),
    );
    let o = polarint(&["verify", "--config", &cfg]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = report(&o);
    assert_eq!(check(&r, "oracle-equivalence")["status"], "pass");
    assert_eq!(check(&r, "k-integrals")["status"], "skipped");
}

#[test]
fn entropy_classifies_quartic_and_rejects_double() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "q.json", &quartic("rational", ""));
    let o = polarint(&["entropy", "--config", &cfg, "--iters", "12"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = report(&o);
    assert_eq!(r["classification"], "subexponential");
    assert_eq!(r["heights"].as_array().unwrap().len(), 12);

    let o = polarint(&["entropy", "--config", &cfg, "--iters", "4"]);
    assert!(o.status.success());
    let r = report(&o);
    assert_eq!(r["insufficient_data"], true);
    assert_eq!(r["classification"], "inconclusive");

    let o = polarint(&["entropy", "--config", &cfg, "--mode", "double"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn report_goes_to_file() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "q.json", &quartic("rational", ""));
    let path = dir.path().join("r.json");
    let o = polarint(&["verify", "--config", &cfg, "--report", path.to_str().unwrap(), "--seed", "7"]);
    assert!(o.status.success());
    let r: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(r["seed"], 7);
}
