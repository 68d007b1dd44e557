use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_torus-mhd"));
    c.env_remove("MHD_OUT_DIR");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const SMALL_T2: &str = r#"{"scenario": "theorem2", "sim": {"resolution": 32, "dt": 0.01}}"#;

#[test]
fn topology_of_t11_lists_eight_points() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("topo");
    let o = run(&["topology", "--field", "taylor:1,1", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = json(&out.join("topology.json"));
    assert_eq!(r["critical_points"].as_array().unwrap().len(), 8);
    assert_eq!(r["signature"]["n_saddles"], 4);
    assert_eq!(r["signature"]["structurally_stable"], false);
    let printed: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(printed, r);
}

#[test]
fn small_theorem2_reports_reconnection() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write(dir.path(), "t2.json", SMALL_T2);
    let out = dir.path().join("t2");
    let o = run(&["theorem2", "--config", &conf, "--out", out.to_str().unwrap(), "--emit-plots"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(out.join("report.json")).unwrap();
    assert!(text.contains(r#""verdict":"reconnection""#));
    let r: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(r["config"]["sim"]["resolution"], 32);
    assert_eq!(r["config"]["sim"]["forcing"]["kind"], "theorem2");
    let lines = std::fs::read_to_string(out.join("diagnostics.ndjson")).unwrap();
    assert_eq!(lines.lines().count(), 3);
    for f in ["energy.dat", "rescaled_error.dat", "plot.gp"] {
        assert!(out.join("plots").join(f).is_file(), "{f}");
    }
}

#[test]
fn verdict_mismatch_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write(
        dir.path(),
        "t1.json",
        r#"{"sim": {"resolution": 32, "dt": 0.01, "t_end": 0.0}, "expected_verdict": "reconnection"}"#,
    );
    let out = dir.path().join("t1");
    let o = run(&["theorem1", "--config", &conf, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert_eq!(json(&out.join("report.json"))["verdict"], "no-reconnection");
}

#[test]
fn missing_config_names_the_path() {
    let o = run(&["theorem1", "--config", "/nonexistent/cfg.json"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("/nonexistent/cfg.json"), "{}", stderr(&o));
}

#[test]
fn malformed_config_reports_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad_syntax = write(dir.path(), "a.json", "{\n  \"delta\": 1e-3,\n  oops\n}");
    let o = run(&["theorem1", "--config", &bad_syntax]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));

    let bad_field = write(dir.path(), "b.json", r#"{"sim": {"dt": "fast"}}"#);
    let o = run(&["theorem1", "--config", &bad_field]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("sim.dt"), "{}", stderr(&o));

    let wrong = write(dir.path(), "c.json", r#"{"sim": {"eta": 0.1}}"#);
    let o = run(&["frozen-in", "--config", &wrong]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("eta"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&run(&["no-such-command"])), 1);
    assert_eq!(code(&run(&["topology"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn gen_field_then_topology_from_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["gen-field", "--field", "2*tilde1", "--resolution", "16", "--out", out]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let snap = dir.path().join("field.mhd");
    assert_eq!(&std::fs::read(&snap).unwrap()[..4], b"MHD2");
    let topo = dir.path().join("topo");
    let o = run(&["topology", "--snapshot", snap.to_str().unwrap(), "--out", topo.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = json(&topo.join("topology.json"));
    assert_eq!(r["signature"]["n_saddles"], 2);
    assert_eq!(r["signature"]["structurally_stable"], true);
    assert_eq!(r["resolution"], 16);
}

#[test]
fn simulate_writes_snapshots_and_resumes() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write(
        dir.path(),
        "sim.json",
        r#"{"sim": {"resolution": 16, "dt": 0.01, "t_end": 0.1, "snapshot_cadence": 5}, "initial_u": "0.5*taylor:1,2", "initial_b": "tilde1"}"#,
    );
    let out = dir.path().join("sim");
    let o = run(&["simulate", "--config", &conf, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let snaps = out.join("snapshots");
    for f in ["snap-00000000.mhd", "snap-00000005.mhd", "snap-00000010.mhd", "last.mhd"] {
        assert!(snaps.join(f).is_file(), "{f}");
    }
    let conf2 = write(
        dir.path(),
        "sim2.json",
        r#"{"sim": {"resolution": 16, "dt": 0.01, "t_end": 0.2}}"#,
    );
    let out2 = dir.path().join("sim2");
    let last = snaps.join("last.mhd");
    let o = run(&["simulate", "--config", &conf2, "--from-snapshot", last.to_str().unwrap(), "--out", out2.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = json(&out2.join("report.json"));
    assert!((r["final_time"].as_f64().unwrap() - 0.2).abs() < 1e-12);
}

#[test]
fn sweep_runs_each_config_in_its_own_directory() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write(
        dir.path(),
        "sweep.json",
        r#"{"runs": [
            {"scenario": "theorem2", "sim": {"resolution": 32, "dt": 0.01}},
            {"scenario": "theorem1", "sim": {"resolution": 32, "dt": 0.01, "t_end": 0.0}},
            {"scenario": "frozen-in", "sim": {"resolution": 16, "dt": 0.01, "t_end": 0.05}}
        ]}"#,
    );
    let out = dir.path().join("sweep");
    let o = run(&["sweep", "--config", &conf, "--threads", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let s = json(&out.join("sweep.json"));
    let entries = s.as_array().unwrap();
    assert_eq!(entries.len(), 3);
    assert_eq!(entries[1]["verdict"], "no-reconnection");
    for d in ["run-000-theorem2", "run-001-theorem1", "run-002-frozen-in"] {
        assert!(out.join(d).join("report.json").is_file(), "{d}");
    }
}

#[test]
fn out_dir_defaults_to_env_root() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .env("MHD_OUT_DIR", dir.path())
        .args(["topology", "--field", "tilde1", "--resolution", "16"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(dir.path().join("topology").join("topology.json").is_file());
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write(dir.path(), "t2.json", SMALL_T2);
    let mut reports = Vec::new();
    for threads in ["1", "3"] {
        let out = dir.path().join(format!("t{threads}"));
        let o = run(&["theorem2", "--config", &conf, "--threads", threads, "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        reports.push((
            std::fs::read(out.join("report.json")).unwrap(),
            std::fs::read(out.join("diagnostics.ndjson")).unwrap(),
        ));
    }
    assert_eq!(reports[0], reports[1]);
}
