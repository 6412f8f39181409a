//! End-to-end tests of the `mfrn` binary: file outputs, exit codes,
//! determinism, and the config surface.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mfrn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mfrn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const SMALL_TANH: &str = r#"{
  "net": {
    "arch": "frn",
    "activation": { "kind": "tanh" },
    "var_w": 1.69, "var_b": 0.49, "var_v": 1.5, "var_a": 0.5,
    "depth": 20
  },
  "sim": { "width": 32, "runs": 3, "seed": 11 },
  "initial_conditions": [[1.0, 0.5], [1.0, 0.9]]
}"#;

#[test]
fn predict_writes_trajectories_and_asymptotics() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", SMALL_TANH);
    let out = tmp.path().join("out");
    let r = mfrn(&["predict", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let fwd = fs::read_to_string(out.join("forward_00.csv")).unwrap();
    assert!(fwd.starts_with("layer,p,q,gamma,lambda,e,s\n"));
    assert_eq!(fwd.lines().count(), 22); // header + layers 0..=20
    assert!(out.join("backward_00.csv").exists());
    let asym: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("asymptotics.json")).unwrap()).unwrap();
    let fp = &asym["asymptotics"]["fixed_point"];
    assert!((fp["e_star"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert!(fp["exponent"].as_f64().unwrap() < 0.5);
}

#[test]
fn predict_flat_q_when_sigma_w_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{
          "net": {
            "arch": "rrn",
            "activation": { "kind": "tanh" },
            "var_w": 0.0, "var_b": 0.49, "depth": 10
          },
          "initial_conditions": [[1.0, 0.3]]
        }"#,
    );
    let out = tmp.path().join("out");
    let r = mfrn(&["predict", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let fwd = fs::read_to_string(out.join("forward_00.csv")).unwrap();
    for line in fwd.lines().skip(2) {
        let q: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert_eq!(q, 0.49);
    }
}

#[test]
fn predict_records_overflow_truncation() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{
          "net": {
            "arch": "frn",
            "activation": { "kind": "alpha_relu", "alpha": 1.0 },
            "var_w": 1.69, "var_b": 0.49, "var_v": 1.5, "var_a": 0.5,
            "depth": 1200
          },
          "initial_conditions": [[1.0, 0.5]]
        }"#,
    );
    let out = tmp.path().join("out");
    let r = mfrn(&["predict", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let asym: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("asymptotics.json")).unwrap()).unwrap();
    let t = &asym["trajectories"][0];
    assert_eq!(t["overflow"], serde_json::json!(true));
    let last = t["last_layer"].as_u64().unwrap();
    assert!(last > 700 && last < 1200, "truncated at {last}");
    let fwd = fs::read_to_string(out.join("forward_00.csv")).unwrap();
    assert_eq!(fwd.lines().count() as u64, last + 2);
}

#[test]
fn simulate_outputs_are_seed_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", SMALL_TANH);
    let out1 = tmp.path().join("a");
    let out2 = tmp.path().join("b");
    for out in [&out1, &out2] {
        let r = mfrn(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    }
    for name in ["stats_forward_00.csv", "stats_forward_01.csv", "stats_backward.csv"] {
        let a = fs::read(out1.join(name)).unwrap();
        let b = fs::read(out2.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
    let cmp: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out1.join("compare.json")).unwrap()).unwrap();
    assert_eq!(cmp["reports"].as_array().unwrap().len(), 3);
}

#[test]
fn verify_kernel_identities_profile_passes() {
    let r = mfrn(&["verify", "--profile", "kernel-identities"]);
    assert!(
        r.status.success(),
        "stdout: {}",
        String::from_utf8_lossy(&r.stdout)
    );
    let report: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&r.stdout)).unwrap();
    assert_eq!(report["all_passed"], serde_json::json!(true));
}

#[test]
fn verify_detects_corrupted_constant() {
    let r = Command::new(env!("CARGO_BIN_EXE_mfrn"))
        .args(["verify", "--profile", "kernel-identities"])
        .env("MFRN_VERIFY_CORRUPT_CALPHA", "1")
        .output()
        .unwrap();
    // the corruption hook only affects the closed-form check, which lives
    // in the default profile
    assert!(r.status.success());
    let r = Command::new(env!("CARGO_BIN_EXE_mfrn"))
        .args(["verify"])
        .env("MFRN_VERIFY_CORRUPT_CALPHA", "1")
        .output()
        .unwrap();
    assert_eq!(r.status.code(), Some(1), "corrupted constant must fail verify");
}

#[test]
fn sweep_single_cell_matches_predict() {
    let tmp = tempfile::tempdir().unwrap();
    let sweep_cfg = write_config(
        tmp.path(),
        "s.json",
        r#"{
          "net": {
            "arch": "frn",
            "activation": { "kind": "tanh" },
            "var_w": 1.69, "var_b": 0.49, "var_v": 1.5, "var_a": 0.5,
            "depth": 30
          },
          "initial_conditions": [[1.0, 0.5]],
          "sweep": {
            "axis1": { "name": "var_w", "values": [1.69] },
            "axis2": { "name": "depth", "values": [30] }
          }
        }"#,
    );
    let sweep_out = tmp.path().join("sweep");
    let r = mfrn(&["sweep", "--config", &sweep_cfg, "--out", sweep_out.to_str().unwrap()]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let sweep_csv = fs::read_to_string(sweep_out.join("sweep.csv")).unwrap();
    let row = sweep_csv.lines().nth(1).unwrap();
    let cols: Vec<&str> = row.split(',').collect();
    let p_l: f64 = cols[2].parse().unwrap();
    let s_l: f64 = cols[3].parse().unwrap();

    let cfg = write_config(
        tmp.path(),
        "p.json",
        r#"{
          "net": {
            "arch": "frn",
            "activation": { "kind": "tanh" },
            "var_w": 1.69, "var_b": 0.49, "var_v": 1.5, "var_a": 0.5,
            "depth": 30
          },
          "initial_conditions": [[1.0, 0.5]]
        }"#,
    );
    let pred_out = tmp.path().join("pred");
    let r = mfrn(&["predict", "--config", &cfg, "--out", pred_out.to_str().unwrap()]);
    assert!(r.status.success());
    let fwd = fs::read_to_string(pred_out.join("forward_00.csv")).unwrap();
    let last = fwd.lines().last().unwrap();
    let cols: Vec<&str> = last.split(',').collect();
    let p_pred: f64 = cols[1].parse().unwrap();
    let s_pred: f64 = cols[6].parse().unwrap();
    assert_eq!(p_l.to_bits(), p_pred.to_bits());
    assert_eq!(s_l.to_bits(), s_pred.to_bits());
    assert!(sweep_out.join("levels.csv").exists());
}

#[test]
fn sweep_rejects_oversized_grid() {
    let tmp = tempfile::tempdir().unwrap();
    let axis: Vec<f64> = (1..=1001).map(|i| i as f64).collect();
    let body = serde_json::json!({
        "net": {
            "arch": "frn",
            "activation": { "kind": "tanh" },
            "var_w": 1.0, "var_b": 0.5, "var_v": 1.0, "var_a": 0.5,
            "depth": 10
        },
        "sweep": {
            "axis1": { "name": "var_w", "values": axis },
            "axis2": { "name": "var_a", "values": axis }
        }
    });
    let cfg = write_config(tmp.path(), "big.json", &body.to_string());
    let r = mfrn(&["sweep", "--config", &cfg, "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn config_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    // unknown key
    let cfg = write_config(
        tmp.path(),
        "bad.json",
        r#"{"net": {"arch": "frn", "activation": {"kind": "tanh"}, "var_w": 1.0,
            "var_b": 0.5, "var_v": 1.0, "var_a": 0.5, "depth": 5}, "typo_key": 3}"#,
    );
    let r = mfrn(&["predict", "--config", &cfg]);
    assert_eq!(r.status.code(), Some(2));
    // RRN with a rectified activation
    let cfg = write_config(
        tmp.path(),
        "bad2.json",
        r#"{"net": {"arch": "rrn", "activation": {"kind": "alpha_relu", "alpha": 0.9},
            "var_w": 1.0, "var_b": 0.5, "depth": 5}}"#,
    );
    let r = mfrn(&["predict", "--config", &cfg]);
    assert_eq!(r.status.code(), Some(2));
    // missing file
    let r = mfrn(&["predict", "--config", "/nonexistent.json"]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn bundled_configs_parse_and_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut n = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        n += 1;
        let text = fs::read_to_string(&path).unwrap();
        let cfg: mfrn_cli::config::ExperimentConfig =
            serde_json::from_str(&text).unwrap_or_else(|e| panic!("{path:?}: {e}"));
        cfg.validate().unwrap_or_else(|e| panic!("{path:?}: {e}"));
        assert!(cfg.label.is_some(), "{path:?} missing label");
    }
    assert!(n >= 10, "expected the bundled config set, found {n}");
}
