use std::fs;

use assert_cmd::Command;
use tempfile::tempdir;

fn bin() -> Command {
    let mut c = Command::cargo_bin("vertframe").unwrap();
    c.env("VERTFRAME_SEED", "20240601");
    c
}

fn stdout(c: &mut Command) -> String {
    String::from_utf8(c.output().unwrap().stdout).unwrap()
}

#[test]
fn verify_small_suite_passes() {
    bin().args(["verify", "--n", "1", "--k", "1"]).assert().code(0);
}

#[test]
fn verify_selected_checks_at_two_two() {
    let out = stdout(bin().args(["verify", "--checks", "lvy-closure,killing,rk4-order"]));
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 3, "{out}");
}

#[test]
fn flipped_theta_fails_with_a_residual() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("mut.json");
    fs::write(&cfg, r#"{"version": 1, "n": 2, "k": 2, "samples": 3, "theta_variant": "flipped-momentum-sign", "checks": ["z-defect", "defining-z"]}"#).unwrap();
    let out = bin().args(["verify", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("FAIL  defining-z") && text.contains("dTheta = ("), "{text}");
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, "{\"version\": 1,\n \"n\": }").unwrap();
    let out = bin().args(["verify", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 2"));
    bin().args(["verify", "--checks", "nope"]).assert().code(2);
    bin().args(["run", "--scenario", "spin"]).assert().code(2);
    bin().args(["bracket", "--space", "LVY", "--xi", "y1,0", "--zeta", "1,0"]).assert().code(2);
}

#[test]
fn run_writes_deterministic_outputs() {
    let (a, b) = (tempdir().unwrap(), tempdir().unwrap());
    for d in [&a, &b] {
        bin().args(["run", "--scenario", "angular-momentum", "--out"]).arg(d.path()).assert().code(0);
    }
    for f in ["angular-momentum.csv", "angular-momentum.json"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let csv = fs::read_to_string(a.path().join("angular-momentum.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert!(header.starts_with("t,J[rot-x]^0,") && header.contains("drift J[rot-y]^3"), "{header}");
    assert_eq!(csv.lines().count(), 10_002);
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(a.path().join("angular-momentum.json")).unwrap()).unwrap();
    assert!(json["metrics"]["max_drift"].as_f64().unwrap() <= 1e-9);
    assert_eq!(json["inputs"]["initial x1"], "1/2");
}

#[test]
fn affine_correction_column_matches() {
    let d = tempdir().unwrap();
    bin().args(["run", "--scenario", "affine", "--out"]).arg(d.path()).assert().code(0);
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.path().join("affine.json")).unwrap()).unwrap();
    assert!(json["metrics"]["max_float_residual"].as_f64().unwrap() <= 1e-12);
    let csv = fs::read_to_string(d.path().join("affine.csv")).unwrap();
    assert!(csv.lines().next().unwrap().contains("correction J^1"));
}

#[test]
fn reparam_with_unit_f_is_conserved() {
    let d = tempdir().unwrap();
    let out = stdout(bin().args(["run", "--scenario", "reparam", "--out"]).arg(d.path()));
    assert!(out.contains("PASS  conserved"), "{out}");
}

#[test]
fn every_preset_runs() {
    let d = tempdir().unwrap();
    for s in ["linear-momentum", "affine-lorentz", "geodesic"] {
        bin().args(["run", "--scenario", s, "--out"]).arg(d.path()).assert().code(0);
    }
}

#[test]
fn bracket_on_lvy_has_zero_defect() {
    let out = stdout(bin().args(["bracket", "--space", "LVY", "--xi", "1,0", "--zeta", "0,1"]));
    assert!(out.contains("defect         = (0, 0)"), "{out}");
}

#[test]
fn bracket_on_z_prints_the_exact_term() {
    let out = stdout(bin().args(["bracket", "--space", "Z", "--n", "2", "--xi", "1,0,0", "--zeta", "0,1,0"]));
    assert!(out.contains("defect         = (1) dp"), "{out}");
    assert!(out.contains("Theta) = (1) dp"), "{out}");
}

#[test]
fn bracket_of_a_field_with_itself_vanishes() {
    let out = stdout(bin().args(["bracket", "--space", "LVY", "--xi", "x1,y1*x1", "--zeta", "x1,y1*x1"]));
    assert!(out.contains("{J(xi),J(zeta)} = (0, 0)"), "{out}");
}
