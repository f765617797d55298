use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn metaspike(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_metaspike"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn n2_reset_mean_from_the_command_line() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = metaspike(&[
        "extinction", "--n", "2", "--model", "reset", "--init", "ladder", "--replicas", "100000",
        "--seed", "42", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = read_json(&out);
    assert_eq!(r["schema_version"], 1);
    let tau = &r["result"]["aggregates"]["tau"];
    let (mean, se) = (tau["mean"].as_f64().unwrap(), tau["se"].as_f64().unwrap());
    assert!((mean - 1.0).abs() <= 3.0 * se, "{mean} +/- {se}");
}

#[test]
fn validation_errors_exit_1_with_one_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad_out = dir.path().join("missing").join("r.json");
    let cases: Vec<Vec<&str>> = vec![
        vec!["extinction", "--n", "3", "--seed", "1", "--bogus"],
        vec!["extinction", "--n", "3"],
        vec!["extinction", "--n", "3", "--seed", "1", "--init", "explicit:1,2,3"],
        vec!["extinction", "--n", "1", "--seed", "1"],
        vec!["extinction", "--n", "3", "--seed", "1", "--model", "sideways"],
        vec!["extinction", "--n", "3", "--seed", "1", "--base", "1.0"],
        vec!["teleport", "--n", "3", "--seed", "1"],
        vec!["extinction", "--n", "3", "--seed", "1", "--replicas", "2", "--out", bad_out.to_str().unwrap()],
    ];
    for args in cases {
        let o = metaspike(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        let e = stderr(&o);
        assert_eq!(e.trim_end().lines().count(), 1, "{args:?}: {e}");
        assert!(e.starts_with("error: "), "{e}");
    }
}

#[test]
fn check_mode_exit_codes() {
    let pass = metaspike(&[
        "extinction", "--n", "2", "--seed", "3", "--replicas", "20000", "--check", "c02_n2_reset_mean",
    ]);
    assert_eq!(pass.status.code(), Some(0), "{}", stderr(&pass));
    assert!(stderr(&pass).contains("PASS"));

    let dir = tempfile::tempdir().unwrap();
    let book = dir.path().join("expect.json");
    std::fs::write(
        &book,
        r#"{"schema_version":1,"criteria":{"wrong":{"metric":"tau_mean","relation":"approx",
            "value":2.0,"tolerance":3,"tolerance_unit":"se","provenance":"deliberately wrong"}}}"#,
    )
    .unwrap();
    let fail = metaspike(&[
        "extinction", "--n", "2", "--seed", "3", "--replicas", "20000", "--check", "wrong",
        "--expectations", book.to_str().unwrap(),
    ]);
    assert_eq!(fail.status.code(), Some(2));
    assert!(stderr(&fail).contains("FAIL"));

    let unknown = metaspike(&["extinction", "--n", "2", "--seed", "3", "--replicas", "10", "--check", "nope"]);
    assert_eq!(unknown.status.code(), Some(1));
}

#[test]
fn csv_and_event_log_headers() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("r.csv");
    let log = dir.path().join("events.csv");
    let o = metaspike(&[
        "extinction", "--n", "3", "--seed", "9", "--replicas", "5", "--out", csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    let body: Vec<&str> = metaspike::output::csv_body(&text).collect();
    assert_eq!(body[0], "replica,tau,jumps,z_spike,z_leak,stop_reason");
    assert_eq!(body.len(), 6);

    let o = metaspike(&[
        "simulate", "--n", "4", "--seed", "9", "--replicas", "1", "--jump-budget", "50",
        "--log", log.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let events = std::fs::read_to_string(&log).unwrap();
    let mut lines = events.lines();
    assert_eq!(lines.next(), Some("n,time,neuron,kind"));
    let rows: Vec<&str> = lines.collect();
    assert!(!rows.is_empty() && rows.len() <= 50);
    let mut last = 0.0;
    for (i, row) in rows.iter().enumerate() {
        let f: Vec<&str> = row.split(',').collect();
        assert_eq!(f[0], (i + 1).to_string());
        let t: f64 = f[1].parse().unwrap();
        assert!(t > last);
        last = t;
        assert!(f[2].parse::<usize>().unwrap() < 4);
        assert!(f[3] == "spike" || f[3] == "leak");
    }
}

#[test]
fn config_echo_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.json");
    let o = metaspike(&[
        "extinction", "--n", "3", "--model", "decrement", "--seed", "17", "--replicas", "50",
        "--out", first.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = read_json(&first);

    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, serde_json::to_string(&report["config"]).unwrap()).unwrap();
    let second = dir.path().join("b.json");
    let o = metaspike(&["extinction", "--config", cfg.to_str().unwrap(), "--out", second.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());

    // flags override the file
    let third = dir.path().join("c.json");
    let o = metaspike(&[
        "extinction", "--config", cfg.to_str().unwrap(), "--seed", "18", "--out", third.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(read_json(&third)["config"]["seed"], 18);
    assert_eq!(read_json(&third)["config"]["model"], "decrement");
}

#[test]
fn config_files_reject_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"experiment":"extinction","n":3,"seed":1,"replicaz":4}"#).unwrap();
    let o = metaspike(&["extinction", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn worker_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["extinction", "--n", "4", "--seed", "5", "--replicas", "200"],
        vec!["coupling", "--n", "9", "--seed", "5", "--replicas", "50"],
        vec!["occupancy", "--n", "6", "--seed", "5", "--replicas", "50", "--format", "csv"],
    ] {
        let mut outs = Vec::new();
        for w in ["1", "3"] {
            let p = dir.path().join(format!("{}-{w}", args[0]));
            let mut a = args.clone();
            a.extend(["--workers", w, "--out", p.to_str().unwrap()]);
            let o = metaspike(&a);
            assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
            outs.push(std::fs::read(&p).unwrap());
        }
        assert_eq!(outs[0], outs[1], "{args:?}");
    }
}
