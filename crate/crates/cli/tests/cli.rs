use std::fs;
use std::process::{Command, Output};

fn sim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gcsa-sim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn ps_costs() {
    let o = sim(&["costs", "--scheme", "ps", "-p", "2", "-X", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.lines().any(|l| l == "R=5"), "{text}");
    assert!(text.lines().any(|l| l == "D=2"), "{text}");
}

#[test]
fn gcsa_toy_costs() {
    let o = sim(&["costs", "-p", "2", "--kc", "2", "-X", "1"]);
    let text = stdout(&o);
    assert!(
        text.contains("R=9") && text.contains("CC=4") && text.contains("D=9/2"),
        "{text}"
    );
}

#[test]
fn partition_sweep_csv() {
    let o = sim(&["sweep", "--axis", "partition", "-X", "5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let gcsa = text
        .lines()
        .find(|l| l.starts_with("GCSA-NA,2,2,2,"))
        .unwrap();
    let ps = text.lines().find(|l| l.starts_with("PS,2,2,2,")).unwrap();
    assert_eq!(gcsa.split(',').nth(14), Some("6"));
    assert_eq!(ps.split(',').nth(14), Some("150"));
}

#[test]
fn sweep_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("batch.csv");
    let o = sim(&[
        "sweep",
        "--axis",
        "batch",
        "--to",
        "4",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(
        fs::read_to_string(&path).unwrap().lines().count(),
        1 + 2 * 4
    );
}

#[test]
fn selftest_passes() {
    let o = sim(&["selftest"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn run_from_config_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("toy.json");
    fs::write(
        &cfg,
        r#"{"S": 11, "X": 1, "ell": 1, "Kc": 2, "p": 2, "m": 1, "n": 1,
            "lambda": 2, "kappa": 2, "mu": 2, "modulus": 13}"#,
    )
    .unwrap();
    let trace = dir.path().join("trace.json");
    let o = sim(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--stragglers",
        "2",
        "--topology",
        "star",
        "--out",
        trace.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("verdict: PASS"));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&trace).unwrap()).unwrap();
    assert_eq!(json["stragglers"].as_array().unwrap().len(), 2);
}

#[test]
fn run_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let o = sim(&[
            "run",
            "-S",
            "10",
            "-p",
            "2",
            "--kc",
            "2",
            "--seed",
            "4",
            "--stragglers",
            "1",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn edge_file_topology() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("edges.json");
    fs::write(&edges, "[[0,2],[2,1]]").unwrap();
    let o = sim(&[
        "run",
        "-S",
        "3",
        "--modulus",
        "5",
        "--topology",
        "path-file",
        edges.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("messages OfflineNoise: 3"));

    fs::write(&edges, "[[0,1]]").unwrap();
    let o = sim(&[
        "run",
        "-S",
        "3",
        "--topology",
        "path-file",
        edges.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not connected"));
}

#[test]
fn ps_and_strassen_runs() {
    let o = sim(&["run", "--scheme", "ps", "-p", "2"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("messages Resharing: 20"));

    let o = sim(&["run", "--scheme", "ps", "-p", "2", "--stragglers", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("server"));

    let o = sim(&[
        "run",
        "--scheme",
        "strassen-na",
        "-S",
        "16",
        "--stragglers",
        "1",
        "--modulus",
        "101",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn too_many_stragglers_fails() {
    let o = sim(&["run", "-S", "4", "--stragglers", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("answers"));
}

#[test]
fn usage_errors() {
    assert!(!sim(&["run", "--scheme", "bgw"]).status.success());
    assert!(!sim(&["frobnicate"]).status.success());
    assert!(!sim(&["run", "--topology", "ring"]).status.success());
}
