use std::process::{Command, Output};

use serde_json::Value;

const MEMBER: &str = r#"{"mean":9000,"harmonics":[[1,0.05]]}"#;
const SMALL: &str = r#"{"mean":5,"harmonics":[[1,0.03],[2,0.01]]}"#;

fn bb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bbilliard")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn classify_constant_profile() {
    let v = json(&bb(&["classify", "--profile", r#"{"mean":1,"harmonics":[]}"#, "--eps", "0.5"]));
    assert_eq!(v["result"]["class"], "R");
    assert_eq!(v["config"]["command"], "classify");
    assert_eq!(v["config"]["profile"]["mean"], 1.0);
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(bb(&["classify", "--nope"]).status.code(), Some(64));
    assert_eq!(bb(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(bb(&["classify", "--profile", "{not json}"]).status.code(), Some(64));
    assert_eq!(bb(&["orbit", "--profile", MEMBER, "--c", "1", "--p", "219", "--q", "2"]).status.code(), Some(64));
    assert_eq!(bb(&["--help"]).status.code(), Some(0));
}

#[test]
fn domain_errors_exit_1() {
    let out = bb(&["map", "--profile", MEMBER, "--c", "1", "--t", "0", "--k", "10"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("domain error"));
    let out = bb(&["orbit", "--profile", MEMBER, "--c", "1", "--p", "219", "--q", "3", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn certify_writes_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cert.json");
    let grid = dir.path().join("a.csv");
    let o = bb(&[
        "certify", "--profile", MEMBER, "--eps", "0.5", "--c", "1",
        "--out", out.to_str().unwrap(), "--a-grid", grid.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["result"]["verdict"], "certified");
    assert_eq!(v["config"]["c"], 1.0);
    let text = std::fs::read_to_string(&grid).unwrap();
    let mut lines = text.lines();
    let first = lines.next().unwrap();
    assert!(first.starts_with("# config="));
    let cfg: Value = serde_json::from_str(&first["# config=".len()..]).unwrap();
    assert_eq!(cfg, v["config"]);
    assert_eq!(lines.next().unwrap(), "K,a_c");
    assert_eq!(lines.count(), 257);
}

#[test]
fn orbit_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let path = dir.path().join(name);
        let o = Command::new(env!("CARGO_BIN_EXE_bbilliard"))
            .env("BB_THREADS", threads)
            .args(["orbit", "--profile", SMALL, "--c", "0.3", "--p", "3", "--q", "2", "--starts", "8", "--seed", "5"])
            .args(["--out", path.to_str().unwrap()])
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(path).unwrap()
    };
    assert_eq!(run("a.json", "1"), run("b.json", "4"));
}

#[test]
fn simulate_and_portrait_write_series() {
    let dir = tempfile::tempdir().unwrap();
    let bounces = dir.path().join("b.csv");
    let traj = dir.path().join("x.csv");
    let v = json(&bb(&[
        "simulate", "--profile", SMALL, "--c", "0.3", "--t", "0.1", "--k", "200", "--n", "50",
        "--bounces", bounces.to_str().unwrap(), "--trajectory", traj.to_str().unwrap(),
    ]));
    assert_eq!(v["result"]["bounces"], 50, "{}", v["result"]["truncated"]);
    assert!(v["result"]["checks"]["interior"].as_bool().unwrap());
    let rows = std::fs::read_to_string(&bounces).unwrap();
    assert_eq!(rows.lines().nth(1).unwrap(), "n,t,K,rdot_plus,theta");
    assert_eq!(rows.lines().count(), 52);
    assert!(std::fs::read_to_string(&traj).unwrap().lines().count() > 100);

    let cloud = dir.path().join("p.csv");
    let o = bb(&[
        "portrait", "--profile", SMALL, "--c", "0.3", "--k-lo", "15", "--k-hi", "30",
        "--nt", "2", "--nk", "2", "--n", "10", "--csv", cloud.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&cloud).unwrap();
    for line in text.lines().skip(2) {
        let t: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!((0.0..1.0).contains(&t));
    }
}

#[test]
fn flight_map_and_lyapunov() {
    let v = json(&bb(&["flight", "--profile", SMALL, "--c", "0.3", "--t0", "0", "--t1", "1.2"]));
    assert!(v["result"]["interior"].as_bool().unwrap());
    let v = json(&bb(&["map", "--profile", SMALL, "--c", "0.3", "--t", "0.2", "--k", "20"]));
    assert!((v["result"]["det"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    let v = json(&bb(&[
        "lyapunov", "--profile", SMALL, "--c", "0.3", "--n", "200", "--count", "3", "--seed", "9",
        "--k-lo", "15", "--k-hi", "30",
    ]));
    assert_eq!(v["result"]["estimates"].as_array().unwrap().len(), 3);
    let out = bb(&["lyapunov", "--profile", SMALL, "--c", "0.3", "--n", "10", "--count", "2", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(1));
}
