//! The `abq` binary: exit codes, artifacts and configuration handling.

use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_abq");

fn abq(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env("ABQ_THREADS", "2").output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<f64>> {
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("# abq-forms v1"));
    lines.next().expect("column line");
    lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect()
}

#[test]
fn norms_example_row() {
    let out = abq(&["norms", "--alpha", "0.3", "--k", "-1", "--lambda", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = stdout(&out);
    assert!(csv.lines().nth(1).unwrap() == "alpha,k,lambda,closed,quadrature,rel_err");
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 1);
    let row = &rows[0];
    assert_eq!(&row[..3], &[0.3, -1.0, 1.0]);
    assert!((row[3] - 8.53966).abs() < 1e-5);
    assert!(row[5] < 1e-7);
}

#[test]
fn boundstates_example_row() {
    let pi2 = std::f64::consts::PI.powi(2).to_string();
    let beta = format!("-{pi2},{pi2},0,0");
    let out = abq(&["boundstates", "--alpha", "0.5", "--beta", &beta, "--bracket", "0.1,10"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = data_rows(&stdout(&out));
    assert_eq!(rows.len(), 1);
    assert!((rows[0][1] - 1.0).abs() < 1e-10);
    assert!((rows[0][2] + 1.0).abs() < 1e-10);
}

#[test]
fn reduce_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flux.json");
    let out = abq(&["reduce", "--raw", "2.7", "-o", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 1);
    let value: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!((value["alpha"].as_f64().unwrap() - 0.7).abs() < 1e-12);
    assert_eq!(value["ell"], 1);
    assert_eq!(value["conjugated"], false);
}

#[test]
fn validation_errors_exit_two() {
    for args in [
        &["norms", "--alpha", "1.5"][..],
        &["reduce", "--raw", "4"],
        &["reduce"],
        &["boundstates", "--alpha", "0.5", "--bracket", "3,1"],
        &["spectrum", "--field", "sheared"],
        &["resolvent", "--z", "2,0"],
        &["spectrum", "--n", "10"],
        &["frobnicate"],
    ] {
        let out = abq(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn non_convergence_exits_three() {
    // The norm overflows for this lambda, which the quadrature reports as non-convergence.
    let out = abq(&["norms", "--alpha", "0.3", "--k", "0", "--lambda", "1e-300"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("did not converge"));
}

#[test]
fn bad_thread_count_is_rejected() {
    let out = Command::new(BIN).args(["reduce", "--raw", "0.5"]).env("ABQ_THREADS", "zero").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ABQ_THREADS"));
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn config_files_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let toml = write(dir.path(), "run.toml", "alpha = 0.5\nbracket = [0.1, 10.0]\n[beta]\nb00 = -9.869604401089358\nb11 = 1.0\n");
    let out = abq(&["boundstates", "--config", &toml]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(data_rows(&stdout(&out)).len(), 1);

    // Flags win over the file.
    let out = abq(&["boundstates", "--config", &toml, "--beta", "5,5,0,0"]);
    assert_eq!(data_rows(&stdout(&out)).len(), 0);

    let json = write(dir.path(), "run.json", r#"{"raw": -0.3}"#);
    let out = abq(&["reduce", "--config", &json]);
    assert!(stdout(&out).contains("\"conjugated\": true"));

    let unknown = write(dir.path(), "bad.toml", "alpha = 0.5\nbogus = 1\n");
    let out = abq(&["boundstates", "--config", &unknown]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));

    let nested = write(dir.path(), "nested.toml", "[grid]\nn = 50\n");
    let out = abq(&["spectrum", "--config", &nested]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid.n"));
}

#[test]
fn tabulated_field_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let table: String = (0..=400).map(|i| format!("{} {}\n", i as f64 * 0.05, 0.5 * i as f64 * 0.05)).collect();
    let path = write(dir.path(), "profile.txt", &table);
    let out = abq(&["spectrum", "--field", "tabulated", "--field-file", &path, "--alpha", "0.5", "--k", "0", "--count", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = data_rows(&stdout(&out));
    assert!((rows[0][3] - 2.0).abs() < 1e-3);
}

#[test]
fn every_subcommand_runs() {
    let dir = tempfile::tempdir().unwrap();
    for (name, args) in [
        ("green", &["green", "--alpha", "0.4"][..]),
        ("xi", &["xi", "--alphas", "0.3", "--lambdas", "1", "--n-theta", "64"]),
        ("qbeta", &["qbeta", "--alpha", "0.3", "--n-theta", "64"]),
        ("inv", &["lambda-invariance", "--alpha", "0.4", "--n-theta", "64"]),
        ("res", &["resolvent", "--n", "400"]),
        ("gamma", &["gamma", "--alphas", "0.2,0.1"]),
    ] {
        let path = dir.path().join(format!("{name}.csv"));
        let out = abq(&[args, &["-o", path.to_str().unwrap()]].concat());
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# abq-forms v1\n"), "{name}");
        assert!(text.lines().count() >= 3, "{name}");
    }
}

#[test]
fn selftest_passes() {
    let out = abq(&["selftest"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).lines().skip(2).all(|l| l.split(',').nth(1) == Some("1")));
}
