use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn zeno(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zeno")).args(args).output().expect("spawn zeno")
}

fn stdout_json(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn stderr_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).expect("stderr is JSON")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|x| x.parse().unwrap_or(f64::NAN)).collect())
        .collect();
    (header, rows)
}

#[test]
fn run_writes_a_complete_bundle() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    let report = stdout_json(&zeno(&["run", "fig4a", "--out", out, "--stride", "200"]));
    let p = report["summary"]["final_P_RL"].as_f64().unwrap();
    assert!((p - 0.5).abs() < 0.02, "{p}");
    let bundle = dir.path().join("fig4a");
    for f in ["timeseries.csv", "summary.json", "scenario.json", "provenance.json"] {
        assert!(bundle.join(f).is_file(), "missing {f}");
    }
    let prov = read_json(&bundle.join("provenance.json"));
    assert_eq!(prov["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(read_json(&bundle.join("summary.json")), report["summary"]);
    assert_eq!(read_json(&bundle.join("scenario.json"))["integrator"]["stride"], 200);
}

#[test]
fn summary_agrees_with_the_time_series() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    let report = stdout_json(&zeno(&["run", "fig4a", "--out", out, "--stride", "100"]));
    let (header, rows) = read_csv(&dir.path().join("fig4a/timeseries.csv"));
    let last = rows.last().unwrap();
    let finals = report["summary"]["final_probabilities"].as_object().unwrap();
    for (label, v) in finals {
        let k = header.iter().position(|h| h == label).unwrap();
        assert!((last[k] - v.as_f64().unwrap()).abs() < 1e-9, "{label}");
    }
    let t = report["summary"]["final_time"].as_f64().unwrap();
    assert!((last[0] - t).abs() < 1e-9 * t);
    let total: f64 = last[1..].iter().sum();
    assert!((total - 1.0).abs() < 1e-8);
}

#[test]
fn rerun_from_scenario_json_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let first = zeno(&["run", "fig9", "--out", a.to_str().unwrap(), "--set", "theta_max=0.0075", "--dt", "0.05"]);
    assert!(first.status.success());
    let config = a.join("fig9/scenario.json");
    assert!(zeno(&["run", config.to_str().unwrap(), "--out", b.to_str().unwrap()]).status.success());
    let read = |p: &Path| std::fs::read(p).unwrap();
    assert_eq!(read(&a.join("fig9/timeseries.csv")), read(&b.join("fig9/timeseries.csv")));
    assert_eq!(read(&a.join("fig9/scenario.json")), read(&b.join("fig9/scenario.json")));
    assert_eq!(read_json(&config)["system"]["theta_max"], 0.0075);
}

#[test]
fn zero_couplings_leave_populations_flat() {
    for key in ["theta_max=0", "lambda_max=0"] {
        let dir = TempDir::new().unwrap();
        let o = zeno(&["run", "fig4a", "--out", dir.path().to_str().unwrap(), "--set", key, "--set", "plateau=200"]);
        let report = stdout_json(&o);
        if key.starts_with("theta") {
            let s = &report["summary"];
            // λ alone only dresses the input with virtual absorber excitations.
            assert!((s["final_P_RL"].as_f64().unwrap() - 1.0).abs() < 1e-5);
            assert_eq!(s["max_bunched_probability"].as_f64().unwrap(), 0.0);
            let (header, rows) = read_csv(&dir.path().join("fig4a/timeseries.csv"));
            let lr = header.iter().position(|h| h == "L.R|G.G").unwrap();
            assert!(rows.iter().all(|r| r[lr] == 0.0));
        } else {
            // Without λ the absorber is idle and θ alone hops photons.
            assert!(report["summary"]["max_bunched_probability"].as_f64().unwrap() > 0.1);
            let (header, rows) = read_csv(&dir.path().join("fig4a/timeseries.csv"));
            let absorbed: Vec<usize> = (1..header.len()).filter(|&k| !header[k].ends_with("G.G")).collect();
            for row in &rows {
                assert!(absorbed.iter().all(|&k| row[k] < 1e-14));
            }
        }
    }
}

#[test]
fn frame_flag_is_recorded_and_agrees() {
    let dir = TempDir::new().unwrap();
    let mut finals = Vec::new();
    for frame in ["lab", "rotating"] {
        let out = dir.path().join(frame);
        let r = stdout_json(&zeno(&[
            "run", "fig10", "--out", out.to_str().unwrap(), "--frame", frame, "--set", "plateau=200", "--dt", "0.002",
        ]));
        let cfg = read_json(&out.join("fig10/scenario.json"));
        assert_eq!(cfg["system"]["frame"], frame);
        finals.push(r["summary"]["final_probabilities"].clone());
    }
    let (a, b) = (finals[0].as_object().unwrap(), finals[1].as_object().unwrap());
    for (k, v) in a {
        assert!((v.as_f64().unwrap() - b[k].as_f64().unwrap()).abs() < 1e-8, "{k}");
    }
}

#[test]
fn unknown_scenario_exits_3() {
    let o = zeno(&["run", "fig99"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stderr_json(&o)["error"], "unknown_scenario");
}

#[test]
fn bad_override_exits_4() {
    for set in ["nonsense=1", "theta_max=-1", "dt=abc", "noequals"] {
        let o = zeno(&["run", "fig4a", "--set", set]);
        assert_eq!(o.status.code(), Some(4), "{set}");
        assert_eq!(stderr_json(&o)["exit_code"], 4);
    }
}

#[test]
fn unreachable_calibration_exits_5() {
    let dir = TempDir::new().unwrap();
    let o = zeno(&[
        "run", "fig4a", "--calibrate", "--out", dir.path().to_str().unwrap(), "--set", "calibration.window=[100,1000]",
    ]);
    assert_eq!(o.status.code(), Some(5));
    assert!(stderr_json(&o)["message"].as_str().unwrap().contains("never changes sign"));
}

#[test]
fn coarse_steps_exit_6() {
    let dir = TempDir::new().unwrap();
    let o = zeno(&[
        "run", "fig4a", "--out", dir.path().to_str().unwrap(), "--set", "step_ratio=0.1", "--set",
        "drift_tolerance=1e-13",
    ]);
    assert_eq!(o.status.code(), Some(6));
    assert!(stderr_json(&o)["message"].as_str().unwrap().contains("smaller dt"));
}

#[test]
fn usage_errors_exit_2() {
    let bad_range = zeno(&["sweep", "fig11", "--param", "omega_r", "--range", "one:two"]);
    assert_eq!(bad_range.status.code(), Some(2));
    assert_eq!(stderr_json(&bad_range)["error"], "usage");
    assert_eq!(zeno(&["run"]).status.code(), Some(2));
    assert_eq!(zeno(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(zeno(&["run", "fig4a", "--frame", "sideways"]).status.code(), Some(2));
}

#[test]
fn missing_scenario_file_exits_7() {
    let o = zeno(&["run", "/nonexistent/dir/scenario.json"]);
    assert_eq!(o.status.code(), Some(7));
}

#[test]
fn malformed_scenario_file_exits_8() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, "{\"name\": 3}").unwrap();
    assert_eq!(zeno(&["run", p.to_str().unwrap()]).status.code(), Some(8));
}

#[test]
fn rates_default_regime() {
    let r = stdout_json(&zeno(&["rates"]));
    assert!((r["regime"]["lambda_over_theta"].as_f64().unwrap() - 32.8).abs() < 1e-9);
    assert_eq!(r["singular"], false);
    assert!(r["regime"]["short_time"].as_bool().unwrap());
    let theta: f64 = 1.0 / 164.0;
    assert!((r["P_B"].as_f64().unwrap() - theta * theta).abs() < 1e-15);
    assert!(r["gamma2"].as_f64().unwrap() > 0.0);
}

#[test]
fn rates_vanish_at_zero_time() {
    let r = stdout_json(&zeno(&["rates", "--t", "0"]));
    for k in ["P_B", "P_AB", "P_TPA", "P_lambda", "P_theta", "dP_B_dt"] {
        assert_eq!(r[k].as_f64().unwrap(), 0.0, "{k}");
    }
}

#[test]
fn rates_flag_singular_detuning() {
    let r = stdout_json(&zeno(&["rates", "--delta", "0"]));
    assert_eq!(r["singular"], true);
    assert!(r["gamma2"].is_null());
    assert!(r["p_TPA"].is_null());
    assert!(r["P_B"].as_f64().unwrap() > 0.0);
}

#[test]
fn rates_reject_negative_time() {
    let o = zeno(&["rates", "--t=-1"]);
    assert_eq!(o.status.code(), Some(8));
}

#[test]
fn single_sample_sweep_matches_run() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    let run = stdout_json(&zeno(&["run", "fig11", "--out", out, "--set", "omega_r=3.5"]));
    let o = zeno(&["sweep", "fig11", "--out", out, "--param", "omega_r", "--range", "3.5:9", "--samples", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_json(&dir.path().join("fig11-sweep-omega_r/sweep.json"));
    assert_eq!(rows.as_array().unwrap().len(), 1);
    assert_eq!(rows[0]["value"], 3.5);
    assert_eq!(rows[0]["summary"], run["summary"]);
}

#[test]
fn sweep_table_has_one_row_per_sample() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = zeno(&[
        "sweep", "fig11", "--out", out, "--param", "omega_r", "--range", "1:21", "--samples", "3", "--sequential",
    ]);
    assert!(o.status.success());
    let (header, rows) = read_csv(&dir.path().join("fig11-sweep-omega_r/sweep.csv"));
    assert_eq!(header[0], "omega_r");
    assert_eq!(rows.iter().map(|r| r[0]).collect::<Vec<_>>(), vec![1.0, 11.0, 21.0]);
    assert!(dir.path().join("fig11-sweep-omega_r/scenario.json").is_file());
    assert_eq!(std::fs::read(dir.path().join("fig11-sweep-omega_r/sweep.csv")).unwrap(), o.stdout);
}

#[test]
fn scenario_json_round_trips() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    for name in ["fig4a", "fig6", "fig11", "distill"] {
        let o = zeno(&["run", name, "--out", out, "--set", "plateau=20", "--dt", "0.05"]);
        assert!(o.status.success(), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        let path = dir.path().join(name).join("scenario.json");
        let text = std::fs::read_to_string(&path).unwrap();
        let parsed = zeno_core::scenarios::Scenario::from_json(&text).unwrap();
        assert_eq!(parsed.to_json().unwrap() + "\n", text, "{name}");
    }
}

#[test]
fn list_names_every_scenario() {
    let o = zeno(&["list"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for name in zeno_core::scenarios::names() {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name}");
    }
}
