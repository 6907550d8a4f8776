use std::path::Path;
use std::process::{Command, Output};

use rattling::solver::{read_events_csv, read_meta_json};

fn rattling(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rattling"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&read(path)).unwrap()
}

#[test]
fn simulate_all_nodes_switch_without_h2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = rattling(&[
        "simulate", "--h1", "1", "--h2", "0", "--c", "0.1", "--events", "50", "--out", out,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = json(&dir.path().join("report.json"));
    let p = report["measured_p_star"].as_f64().unwrap();
    assert!((p - 48.0 / 49.0).abs() < 1e-12, "{p}");
    assert_eq!(report["predicted_p_star"].as_f64().unwrap(), 1.0);
    let events = read_events_csv(read(&dir.path().join("events.csv")).as_bytes()).unwrap();
    assert_eq!(
        events.iter().map(|e| e.node).collect::<Vec<_>>(),
        (0..50).collect::<Vec<_>>()
    );
    let meta = read_meta_json(read(&dir.path().join("events.json")).as_bytes()).unwrap();
    let log = meta.into_log(events).unwrap();
    assert_eq!(log.events.len(), 50);
    assert!(meta_has_no_timestamp(&dir.path().join("events.json")));
}

fn meta_has_no_timestamp(path: &Path) -> bool {
    json(path).get("timestamp").is_none()
}

#[test]
fn simulate_is_deterministic_and_rescales() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = rattling(&[
            "simulate",
            "--h2",
            "1",
            "--events",
            "24",
            "--epsilon",
            "0.1",
            "--dense-times",
            "2",
            "--out",
            d.path().to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in [
        "events.csv",
        "events.json",
        "report.json",
        "omega.csv",
        "profile.csv",
        "bounds.json",
    ] {
        assert_eq!(
            read(&a.path().join(f)),
            read(&b.path().join(f)),
            "{f} differs"
        );
    }
    let csv = read(&a.path().join("events.csv"));
    assert!(csv.starts_with("node,time,tau\n0,0,0\n"));
    for line in csv.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((v[2] - 0.01 * v[1]).abs() <= 1e-12 * v[1].max(1.0));
    }
}

#[test]
fn simulate_time_stepper() {
    let dir = tempfile::tempdir().unwrap();
    let o = rattling(&[
        "simulate",
        "--method",
        "time-stepper",
        "--time",
        "40",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let meta = json(&dir.path().join("events.json"));
    assert_eq!(meta["solver"]["method"], "time_stepper");
    assert!(meta["solver"]["lattice_halfwidth"].as_u64().unwrap() > 10);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(
        rattling(&["simulate", "--c", "0.6", "--out", out])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        rattling(&["simulate", "--time-tol", "-1", "--out", out])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        rattling(&[
            "simulate",
            "--method",
            "time-stepper",
            "--time",
            "100",
            "--halfwidth",
            "5",
            "--out",
            out
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(rattling(&["astar", "--lambda", "2"]).status.code(), Some(2));
    assert_eq!(
        rattling(&["pattern", "--alpha", "1.5", "--out", out])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(rattling(&["pattern", "--out", out]).status.code(), Some(2));
    assert_eq!(rattling(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(
        rattling(&["selftest", "--strict", "-1"]).status.code(),
        Some(2)
    );
}

#[test]
fn astar_table() {
    let o = rattling(&["astar"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("lambda,a_star_value,a_star_gradient,a_star_rate,max_disagreement")
    );
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 4);
    for w in rows.windows(2) {
        assert!(w[1][2] < w[0][2]);
    }
    assert!(rows.iter().all(|r| r[4] <= 1e-8));

    let o = rattling(&["astar", "--lambda", "10"]);
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 2);

    let dir = tempfile::tempdir().unwrap();
    let prof = dir.path().join("profiles.csv");
    let o = rattling(&[
        "astar",
        "--lambda",
        "10",
        "--profiles",
        prof.to_str().unwrap(),
        "--points",
        "9",
    ]);
    assert!(o.status.success());
    let text = read(&prof);
    assert!(text.starts_with("x,F_a0.2,F_a1,F_a5,G_a0.2,G_a1,G_a5,H_a0.2,H_a1,H_a5\n"));
    assert_eq!(text.lines().count(), 10);
}

#[test]
fn pattern_quasiperiodic() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = rattling(&[
        "pattern", "--alpha", "0.5", "--beta", "0.25", "--nmax", "1000", "--window", "1,1",
        "--out", out,
    ]);
    assert!(o.status.success());
    let summary = json(&dir.path().join("summary.json"));
    assert_eq!(summary["window_holds"], true);
    let members: Vec<u64> = read(&dir.path().join("membership.csv"))
        .lines()
        .skip(2)
        .filter(|l| l.ends_with(",1"))
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(members, (1..=500).map(|i| 2 * i).collect::<Vec<u64>>());

    let o = rattling(&["pattern", "--alpha", "1", "--nmax", "20", "--out", out]);
    assert!(o.status.success());
    assert_eq!(json(&dir.path().join("summary.json"))["members"], 20);
}

#[test]
fn pattern_from_spec_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    std::fs::write(&spec, r#"{"explicit_nodes": [1, 3, 5, 7]}"#).unwrap();
    let o = rattling(&[
        "pattern",
        "--spec",
        spec.to_str().unwrap(),
        "--nmax",
        "8",
        "--window",
        "1,1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = json(&dir.path().join("summary.json"));
    assert_eq!(summary["members"], 4);
    assert_eq!(summary["window_holds"], true);
}

#[test]
fn pattern_counterexample() {
    let dir = tempfile::tempdir().unwrap();
    let o = rattling(&[
        "pattern",
        "--counterexample",
        "--levels",
        "12",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = read(&dir.path().join("counterexample.csv"));
    let rows: Vec<Vec<String>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    assert_eq!(rows.len(), 12);
    let density: Vec<f64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(density.iter().skip(2).any(|&d| d < 0.45));
    assert!(density.iter().skip(2).any(|&d| d > 0.55));
}

#[test]
fn selftest_groups() {
    let o = rattling(&["selftest"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let o = rattling(&["selftest", "--group", "green"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().all(|l| l.trim_start().starts_with("green")));
    let o = rattling(&["selftest", "--group", "specfun", "--strict", "1e-30"]);
    assert_eq!(o.status.code(), Some(4));
}
