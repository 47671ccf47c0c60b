use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn satfront(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_satfront"))
        .args(args)
        .arg("--out-dir")
        .arg(dir)
        .env_remove("SATFRONT_OUT_DIR")
        .output()
        .unwrap()
}

fn summary(dir: &Path, args: &[&str]) -> Value {
    let out = satfront(dir, args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn error(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).unwrap()
}

#[test]
fn speeds_and_regimes() {
    let dir = tempfile::tempdir().unwrap();
    let s = summary(dir.path(), &["speed", "--kind", "bistable", "--eps", "0.01,0.005"]);
    let r = &s["result"];
    assert!((r[0]["value"].as_f64().unwrap() - 6.3255e-4).abs() < 1e-7);
    assert_eq!(r[0]["regime"], "regular_front");
    assert_eq!(r[1]["value"], 0.0);
    assert_eq!(r[1]["regime"], "discontinuous_steady_state");
    for f in s["files"].as_array().unwrap() {
        assert!(dir.path().join(f.as_str().unwrap()).is_file());
    }
    let m = summary(dir.path(), &["speed", "--kind", "monostable", "--eps", "0.01", "--method", "shooting"]);
    let c = m["result"][0]["value"].as_f64().unwrap();
    assert!((c - 2.0 * 0.0024f64.sqrt()).abs() / c < 1e-4);
}

#[test]
fn front_with_plot() {
    let dir = tempfile::tempdir().unwrap();
    let s = summary(dir.path(), &["front", "--critical", "bistable", "--eps", "0.1,0.01", "--plot"]);
    let files: Vec<&str> = s["files"].as_array().unwrap().iter().map(|f| f.as_str().unwrap()).collect();
    let svg = files.iter().find(|f| f.ends_with(".svg")).expect("no plot");
    let text = std::fs::read_to_string(dir.path().join(svg)).unwrap();
    assert!(text.starts_with("<svg") && text.trim_end().ends_with("</svg>"));
    let csv = std::fs::read_to_string(dir.path().join("front_critical_bistable_eps0.01.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("z,v,piece_index,monotonicity"));
    for front in s["result"].as_array().unwrap() {
        assert!(front["residual"]["max_abs"].as_f64().unwrap() < 1e-4);
    }
}

#[test]
fn steady_jump_matches_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let s = summary(dir.path(), &["steady", "--eps", "0.004"]);
    let jump = &s["result"][0]["jump"];
    let r = satfront::BistableReaction::cubic(0.4).unwrap();
    let (vm, vp) = satfront::jump_endpoints(&r, 0.004).unwrap();
    assert_eq!(jump["v_minus"].as_f64().unwrap(), vm);
    assert_eq!(jump["v_plus"].as_f64().unwrap(), vp);
}

#[test]
fn zero_speed_glue_bounces() {
    let dir = tempfile::tempdir().unwrap();
    let s = summary(dir.path(), &["nonmonotone", "--eps", "0.5", "--c", "0", "--turns", "4"]);
    let zeros: Vec<f64> = s["result"]["zeros"].as_array().unwrap().iter().map(|z| z.as_f64().unwrap()).collect();
    assert!(zeros.len() >= 4);
    for (k, z) in zeros.iter().enumerate() {
        let target = if k % 2 == 0 { 2.0 / 3.0 } else { 0.0 };
        assert!((z - target).abs() < 1e-6, "{zeros:?}");
    }
}

#[test]
fn zero_speed_trajectory_follows_the_primitive() {
    let dir = tempfile::tempdir().unwrap();
    let s = summary(dir.path(), &["trajectory", "--eps", "0.05", "--c", "0", "--anchor", "0", "--direction", "forward"]);
    assert_eq!(s["result"]["event"]["type"], "hit_zero");
    let r = satfront::BistableReaction::cubic(0.4).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("trajectory_eps0.05_c0_from0.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let (v, y) = line.split_once(',').unwrap();
        let (v, y): (f64, f64) = (v.parse().unwrap(), y.parse().unwrap());
        assert!((y - r.f_minus(v)).abs() < 1e-9, "v = {v}");
    }
}

#[test]
fn runs_are_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["front", "--c", "0.3", "--eps", "0.05"];
    summary(a.path(), &args);
    summary(b.path(), &args);
    for name in ["front_monostable_c0.3_eps0.05.csv", "front_monostable_c0.3_eps0.05.json"] {
        assert_eq!(std::fs::read(a.path().join(name)).unwrap(), std::fs::read(b.path().join(name)).unwrap());
    }
}

#[test]
fn failures_report_json_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let below = satfront(dir.path(), &["front", "--c", "0.01", "--eps", "0.05"]);
    assert_eq!(below.status.code(), Some(1));
    assert_eq!(error(&below)["error"], "regime");

    let ipof = satfront(dir.path(), &["speed", "--kind", "monostable", "--eps", "0.01", "--method", "require-ipof"]);
    assert_eq!(ipof.status.code(), Some(1));
    assert_eq!(error(&ipof)["error"], "ipof");

    let usage = satfront(dir.path(), &["speed", "--kind", "sideways", "--eps", "0.01"]);
    assert_eq!(usage.status.code(), Some(2));
    assert_eq!(error(&usage)["error"], "usage");

    let grid = satfront(dir.path(), &["sweep", "--metric", "step", "--eps-grid", "0.01,0.1"]);
    assert_eq!(grid.status.code(), Some(1));
    assert!(error(&grid)["message"].as_str().unwrap().contains("decreasing"));
}

#[test]
fn config_file_and_out_dir_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let from_config = dir.path().join("from-config");
    let config = dir.path().join("run.toml");
    std::fs::write(
        &config,
        format!("out_dir = {:?}\n[reaction]\ntype = \"cubic\"\na = 0.3\n", from_config.to_str().unwrap()),
    )
    .unwrap();
    let from_env = dir.path().join("from-env");
    let run = |with_config: bool| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_satfront"));
        cmd.args(["speed", "--kind", "monostable", "--eps", "0.01"]).env("SATFRONT_OUT_DIR", &from_env);
        if with_config {
            cmd.arg("--config").arg(&config);
        }
        let out = cmd.output().unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        serde_json::from_slice::<Value>(&out.stdout).unwrap()
    };
    let s = run(true);
    assert_eq!(Path::new(s["out_dir"].as_str().unwrap()), from_config);
    // a = 0.3 gives f'(α) = 0.21
    let c = s["result"][0]["value"].as_f64().unwrap();
    assert!((c - 2.0 * 0.0021f64.sqrt()).abs() < 1e-12);
    let s = run(false);
    assert_eq!(Path::new(s["out_dir"].as_str().unwrap()), from_env);

    std::fs::write(&config, "colour = \"red\"\n").unwrap();
    let bad = satfront(dir.path(), &["speed", "--kind", "bistable", "--eps", "0.01", "--config", config.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(error(&bad)["error"], "config");
}

#[test]
fn small_sweeps() {
    let dir = tempfile::tempdir().unwrap();
    let s = summary(dir.path(), &["sweep", "--metric", "pairing", "--which", "bistable", "--eps-grid", "0.05,0.005"]);
    let csv = std::fs::read_to_string(dir.path().join("sweep_pairing_bistable.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    let values: Vec<f64> = s["result"]["values"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    let limit = (-1.0f64).exp();
    assert!((values[1] - limit).abs() < (values[0] - limit).abs());

    let s = summary(dir.path(), &["sweep", "--metric", "energy", "--c", "0.4", "--eps-grid", "0.1:0.01:3:log"]);
    assert_eq!(s["result"]["eps_grid"].as_array().unwrap().len(), 3);
    for v in s["result"]["values"].as_array().unwrap() {
        assert!((v.as_f64().unwrap() - 0.0252).abs() < 1e-4);
    }
}
