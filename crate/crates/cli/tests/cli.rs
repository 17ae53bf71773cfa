use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn finqm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_finqm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn verify_passes_at_five() {
    let dir = tempfile::tempdir().unwrap();
    let o = finqm(&["verify", "--n", "5", "--omega", "1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&dir.path().join("verify.json"));
    assert_eq!(r["passed"], true);
    let checks = r["checks"].as_array().unwrap();
    assert!(checks.len() > 20);
    assert!(checks.iter().all(|c| c["tag"].is_string() && c["residual"].is_number()));
    assert_eq!(r["config"]["seed"], 0);
}

#[test]
fn verify_rejects_bad_modulus() {
    for n in ["4", "2", "9", "1"] {
        let o = finqm(&["verify", "--n", n, "--omega", "1"]);
        assert_eq!(code(&o), 2);
        assert!(String::from_utf8_lossy(&o.stderr).contains("modulus must be an odd prime"));
    }
    let o = finqm(&["verify", "--n", "5", "--omega", "5"]);
    assert_eq!(code(&o), 2);
    let o = finqm(&["verify", "--n", "5", "--tolerance", "0"]);
    assert_eq!(code(&o), 2);
    let o = finqm(&["verify", "--n", "5", "--backend", "quad"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn verify_exact_residuals_are_zero() {
    let o = finqm(&["verify", "--n", "3", "--backend", "exact"]);
    assert_eq!(code(&o), 0);
    let r = stdout_json(&o);
    assert_eq!(r["config"]["backend"], "exact");
    for c in r["checks"].as_array().unwrap() {
        if c["asserted"] == true {
            assert_eq!(c["residual"].as_f64().unwrap(), 0.0, "{}", c["name"]);
        }
    }
}

#[test]
fn verify_is_deterministic() {
    let a = finqm(&["verify", "--n", "7", "--seed", "11", "--samples", "10"]);
    let b = finqm(&["verify", "--n", "7", "--seed", "11", "--samples", "10"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn wigner_delta_has_single_row() {
    let dir = tempfile::tempdir().unwrap();
    let o = finqm(&["wigner", "--n", "5", "--state", "delta:2", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(dir.path().join("wigner.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,s,value"));
    let rows: Vec<(u32, u32, f64)> = lines
        .map(|l| {
            let v: Vec<&str> = l.split(',').collect();
            (v[0].parse().unwrap(), v[1].parse().unwrap(), v[2].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 25);
    for (i, (r, s, v)) in rows.iter().enumerate() {
        assert_eq!((*r as usize, *s as usize), (i / 5, i % 5));
        let want = if *r == 2 { 1.0 } else { 0.0 };
        assert!((v - want).abs() < 1e-12);
    }
    let r = json(&dir.path().join("wigner.json"));
    assert_eq!(r["passed"], true);
    assert_eq!(r["fourier_wigner"].as_array().unwrap().len(), 5);
    assert!(dir.path().join("fourier_wigner.csv").exists());
}

#[test]
fn wigner_uniform_momentum_marginal() {
    // the uniform state is the m = 0 character: momentum mass sits at s = 0
    let o = finqm(&["wigner", "--n", "7", "--state", "uniform"]);
    assert_eq!(code(&o), 0);
    let r = stdout_json(&o);
    let mm: Vec<f64> = r["momentum_marginal"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!((mm[0] - 7.0).abs() < 1e-10);
    assert!(mm[1..].iter().all(|x| x.abs() < 1e-10));
    // char:m moves it to s = m / (2 omega)
    let o = finqm(&["wigner", "--n", "7", "--omega", "3", "--state", "char:1"]);
    let r = stdout_json(&o);
    let mm: Vec<f64> = r["momentum_marginal"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    // 1 / 6 = 6 mod 7
    assert!((mm[6] - 7.0).abs() < 1e-10, "{mm:?}");
}

#[test]
fn wigner_state_files() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    fs::write(&good, r#"{"n": 3, "omega": 2, "amplitudes": [[0.6, 0], [0, 0.8], [0, 0]]}"#).unwrap();
    let o = finqm(&["wigner", "--state", good.to_str().unwrap(), "--require-normalized"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout_json(&o)["omega"], 2);

    let raw = dir.path().join("raw.json");
    fs::write(&raw, r#"{"n": 3, "omega": 1, "amplitudes": [[1, 0], [1, 0], [0, 0]]}"#).unwrap();
    assert_eq!(code(&finqm(&["wigner", "--state", raw.to_str().unwrap()])), 0);
    assert_eq!(code(&finqm(&["wigner", "--state", raw.to_str().unwrap(), "--require-normalized"])), 2);

    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"n": 3, "amplitudes": "x"}"#).unwrap();
    assert_eq!(code(&finqm(&["wigner", "--state", bad.to_str().unwrap()])), 2);
    let short = dir.path().join("short.json");
    fs::write(&short, r#"{"n": 5, "omega": 1, "amplitudes": [[1, 0]]}"#).unwrap();
    assert_eq!(code(&finqm(&["wigner", "--state", short.to_str().unwrap()])), 2);
    assert_eq!(code(&finqm(&["wigner", "--n", "5", "--state", good.to_str().unwrap()])), 2);
    assert_eq!(code(&finqm(&["wigner", "--state", "/nonexistent/state.json"])), 2);
    assert_eq!(code(&finqm(&["wigner", "--n", "3", "--state", "chirp:x"])), 2);
}

#[test]
fn wigner_exact_backend() {
    let o = finqm(&["wigner", "--n", "3", "--backend", "exact", "--state", "chirp:1"]);
    assert_eq!(code(&o), 0);
    let r = stdout_json(&o);
    for c in r["checks"].as_array().unwrap() {
        assert_eq!(c["residual"].as_f64().unwrap(), 0.0);
    }
}

#[test]
fn oscillator_returns_after_period() {
    let dir = tempfile::tempdir().unwrap();
    let o = finqm(&[
        "evolve", "oscillator", "--n", "3", "--steps", "4", "--state", "chirp:1", "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let r = json(&dir.path().join("evolve.json"));
    let traj = r["trajectory"].as_array().unwrap();
    assert_eq!(traj.len(), 5);
    for (a, b) in traj[0]["amplitudes"].as_array().unwrap().iter().zip(traj[4]["amplitudes"].as_array().unwrap()) {
        for i in 0..2 {
            assert!((a[i].as_f64().unwrap() - b[i].as_f64().unwrap()).abs() < 1e-9);
        }
    }
    assert_eq!(r["generator"]["order"], 4);
    let csv = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6);
    assert!(csv.starts_with("n,"));
}

#[test]
fn oscillator_delta_flag() {
    let o = finqm(&["evolve", "oscillator", "--n", "7", "--delta", "-1"]);
    assert_eq!(code(&o), 0);
    let r = stdout_json(&o);
    assert_eq!(r["generator"]["delta"], 6);
    assert_eq!(r["trajectory"].as_array().unwrap().len(), 9);
    // 2 is a square mod 7
    assert_eq!(code(&finqm(&["evolve", "oscillator", "--n", "7", "--delta", "2"])), 2);
}

#[test]
fn free_family() {
    let o = finqm(&["evolve", "free", "--n", "5", "--mass", "2", "--state", "uniform"]);
    assert_eq!(code(&o), 0);
    let r = stdout_json(&o);
    assert_eq!(r["trajectory"].as_array().unwrap().len(), 5);
    let row = r["checks"].as_array().unwrap().iter().find(|c| c["name"] == "free_semigroup").unwrap();
    assert!(row["residual"].as_f64().unwrap() < 1e-9);
    assert_eq!(code(&finqm(&["evolve", "free", "--n", "5", "--mass", "0"])), 2);
    assert_eq!(code(&finqm(&["evolve", "free", "--n", "5", "--mass", "10"])), 2);
}

#[test]
fn zero_steps_is_a_single_snapshot() {
    for fam in ["free", "oscillator"] {
        let o = finqm(&["evolve", fam, "--n", "5", "--steps", "0", "--state", "delta:3"]);
        assert_eq!(code(&o), 0);
        let r = stdout_json(&o);
        let traj = r["trajectory"].as_array().unwrap();
        assert_eq!(traj.len(), 1);
        assert_eq!(traj[0]["amplitudes"][3][0].as_f64().unwrap(), 1.0);
    }
}

#[test]
fn oracle_command() {
    let o = finqm(&["oracle", "--n", "3", "--omega", "2", "--backend", "exact"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = stdout_json(&o);
    assert_eq!(r["worst_residual"].as_f64().unwrap(), 0.0);
    assert_eq!(r["ideal"]["rank"], 3);
    assert!(r["doubled"]["moment_sums"].is_array());
    let o = finqm(&["oracle", "--n", "3"]);
    assert_eq!(code(&o), 0);
    assert!(stdout_json(&o)["worst_residual"].as_f64().unwrap() < 1e-8);
    assert_eq!(code(&finqm(&["oracle", "--n", "7"])), 2);
}

#[test]
fn invariants_command() {
    let o = finqm(&["invariants", "--n", "7", "--state", "chirp:2", "--samples", "50"]);
    assert_eq!(code(&o), 0);
    let r = stdout_json(&o);
    assert_eq!(r["orders"].as_array().unwrap().len(), 7);
    assert_eq!(r["oscillator_trajectory"].as_array().unwrap().len(), 9);
    assert_eq!(r["chirp_drift"].as_array().unwrap().len(), 7);
    assert_eq!(r["passed"], true);
    assert_eq!(code(&finqm(&["invariants", "--n", "7", "--max-order", "9"])), 2);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&finqm(&[])), 2);
    assert_eq!(code(&finqm(&["evolve", "--n", "5"])), 2);
    assert_eq!(code(&finqm(&["verify"])), 2);
}
