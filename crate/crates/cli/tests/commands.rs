//! End-to-end runs of the `fwm-vapor` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn fwm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fwm-vapor")).args(args).output().expect("binary runs")
}

fn run(sub: &str, config: &Path, out: &Path) -> Output {
    fwm(&[sub, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// fig4.cfg shrunk to a 128×128 grid and 20 steps.
fn small_config(dir: &Path, edit: impl FnOnce(&mut Value)) -> PathBuf {
    let mut v: Value = serde_json::from_str(&fs::read_to_string(scenario("fig4.cfg")).unwrap()).unwrap();
    v["grid"] = serde_json::json!({ "nx": 128, "ny": 128, "dx": 6.25e-6, "dy": 6.25e-6 });
    v["run"]["snapshots"] = 20.into();
    v["run"]["export_every"] = 10.into();
    edit(&mut v);
    let path = dir.join("small.cfg");
    fs::write(&path, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    path
}

fn assert_error(output: &Output, out: &Path, code: i32, kind: &str) -> Value {
    assert_eq!(output.status.code(), Some(code), "stderr: {}", String::from_utf8_lossy(&output.stderr));
    let report = read_json(&out.join("error.json"));
    assert_eq!(report["error"]["kind"], kind);
    assert_eq!(report["error"]["exit_code"], code);
    let stderr: Value = serde_json::from_str(String::from_utf8_lossy(&output.stderr).lines().last().unwrap()).unwrap();
    assert_eq!(stderr, report);
    report
}

#[test]
fn steady_state_writes_state_and_meta() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("ss");
    let o = run("steady-state", &scenario("fig4.cfg"), &out);
    assert!(o.status.success());
    let stdout: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(stdout["ok"], true);
    assert_eq!(stdout["command"], "steady-state");
    let state = read_json(&out.join("steady_state.json"));
    let pops: Vec<f64> = state["populations"].as_array().unwrap().iter().map(|p| p.as_f64().unwrap()).collect();
    assert!((pops.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!(state["residual"].as_f64().unwrap() < 1e-10);
    let meta = read_json(&out.join("run_meta.json"));
    assert_eq!(meta["run_meta_version"], 1);
    assert_eq!(meta["command"], "steady-state");
    assert!(meta["resolved"]["k1"].as_f64().unwrap() > 0.0);
}

#[test]
fn susceptibility_table_has_all_channels() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("chi");
    assert!(run("susceptibility", &scenario("fig4.cfg"), &out).status.success());
    let text = fs::read_to_string(out.join("susceptibility.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k_perp,chi_p_re,chi_p_im,chi_s_re,chi_s_im,chi_sp_re,chi_sp_im,chi_ps_re,chi_ps_im");
    assert_eq!(lines.len(), 202);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 9));
}

#[test]
fn calibrate_reports_flat_root() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("cal");
    assert!(run("calibrate", &scenario("fig4.cfg"), &out).status.success());
    let cal = read_json(&out.join("calibration.json"));
    assert!(cal["flatness_at_root"].as_f64().unwrap().abs() < 1e-3);
    assert_eq!(cal["n0_guess"], 1.32e18);
}

#[test]
fn propagate_rerun_from_meta_is_bit_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path(), |_| {});
    let first = tmp.path().join("a");
    let o = run("propagate", &cfg, &first);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let metrics = fs::read(first.join("metrics.csv")).unwrap();
    let text = String::from_utf8(metrics.clone()).unwrap();
    assert!(text.starts_with("z,P_p,P_s,w_p_fit,w_s_fit,w_p_rms,w_s_rms,peak_p,peak_s\n"));
    assert_eq!(text.lines().count(), 22);
    for stem in ["step00000", "step00010", "step00020"] {
        let side = read_json(&first.join("snapshots").join(format!("{stem}.json")));
        assert_eq!(side["nx"], 128);
        for file in ["probe_re", "probe_im", "signal_re", "signal_im"] {
            let name = side[file].as_str().unwrap();
            assert_eq!(fs::metadata(first.join("snapshots").join(name)).unwrap().len(), 128 * 128 * 8);
        }
    }
    let second = tmp.path().join("b");
    assert!(run("propagate", &first.join("run_meta.json"), &second).status.success());
    assert_eq!(fs::read(second.join("metrics.csv")).unwrap(), metrics);
}

#[test]
fn sweep_writes_one_row_per_pump() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path(), |v| {
        v["run"]["sweep"] = serde_json::json!({ "pump_min": 0.0, "pump_max": 1.0, "points": 3 });
    });
    let out = tmp.path().join("sweep");
    assert!(run("sweep-pump", &cfg, &out).status.success());
    let text = fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.starts_with("p_over_gamma31,n0,delta,k1,"));
}

#[test]
fn unknown_field_is_a_parse_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path(), |v| v["run"]["colour"] = "blue".into());
    let out = tmp.path().join("e");
    let report = assert_error(&run("steady-state", &cfg, &out), &out, 2, "parse");
    assert!(report["error"]["details"]["line"].as_u64().unwrap() > 0);
}

#[test]
fn invalid_values_are_listed() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path(), |v| {
        v["atom"]["gamma42"] = (-1.0).into();
        v["grid"]["nx"] = 100.into();
    });
    let out = tmp.path().join("e");
    let report = assert_error(&run("propagate", &cfg, &out), &out, 2, "validation");
    assert!(report["error"]["details"].as_array().unwrap().len() >= 2);
}

#[test]
fn missing_image_is_a_configuration_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path(), |v| {
        v["beam"] = serde_json::json!({ "image": { "path": "nowhere.pgm", "width_scale": 4e-6, "reference_width": 1e-4 } });
    });
    let out = tmp.path().join("e");
    assert_error(&run("propagate", &cfg, &out), &out, 2, "image");
}

#[test]
fn coarse_grid_fails_bandwidth_check() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path(), |v| {
        v["grid"] = serde_json::json!({ "nx": 64, "ny": 64, "dx": 1e-4, "dy": 1e-4 });
        v["beam"]["gaussian"]["w_p0"] = 1e-3.into();
    });
    let out = tmp.path().join("e");
    assert_error(&run("propagate", &cfg, &out), &out, 2, "validation");
}

#[test]
fn dark_ground_state_is_a_numerical_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path(), |v| {
        v["drive"]["omega_c1"] = 0.0.into();
        v["drive"]["omega_c2"] = 0.0.into();
        v["drive"]["pump_p"] = 0.0.into();
    });
    let out = tmp.path().join("e");
    assert_error(&run("steady-state", &cfg, &out), &out, 3, "atom");
}
