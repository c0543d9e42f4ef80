use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sqg_cli::read_series;

const BASE: &str = r#"
grid.n = 16
init.kind = "random_band"
init.band_max = 4.0
init.amplitude = 0.3
params.a = 0.1
params.alpha = 0.25
params.s = 2.5
solver.dt = 1e-2
solver.t_end = 0.2
solver.output_stride = 2
"#;

fn sqg(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqg"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn write_config(dir: &Path, extra: &str) -> String {
    let path = dir.join("exp.toml");
    fs::write(&path, format!("{BASE}{extra}")).unwrap();
    path.display().to_string()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn linear_single_mode_matches_closed_form() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "");
    let text = fs::read_to_string(&cfg)
        .unwrap()
        .replace("\"random_band\"", "\"single_mode\"")
        .replace("amplitude = 0.3", "amplitude = 2.0");
    fs::write(&cfg, text).unwrap();
    let out = sqg(
        tmp.path(),
        &["run", "--config", &cfg, "--out", "run", "--quiet"],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out.stdout.is_empty());
    let rows = read_series(&tmp.path().join("run/series.csv")).unwrap();
    assert_eq!(rows.len(), 11);
    // θ = 2cos(x1): θ̂(±1, 0) = 1, decay rate |k|^{2alpha} = 1
    let (a, s, alpha) = (0.1f64, 2.5f64, 0.25f64);
    let l2_0 = 2f64.sqrt();
    let hs_0 = l2_0 * 2f64.powf(s / 2.0);
    let hg_0 = hs_0 * a.exp();
    for r in &rows {
        let e = (-r.t).exp();
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-10 * y.abs().max(1.0);
        assert!(close(r.l2, l2_0 * e), "l2 at {}", r.t);
        assert!(close(r.hs, hs_0 * e), "hs at {}", r.t);
        assert!(close(r.hs_gevrey, hg_0 * e), "hs_gevrey at {}", r.t);
        assert!(
            close(r.dissipation_integral, hg_0 * hg_0 * (1.0 - e * e) / 2.0),
            "diss at {}",
            r.t
        );
        assert!(r.budget_residual.abs() <= 1e-10);
        assert!(
            close(r.x1_weighted, 2.0 * (a * alpha).exp() * e),
            "x1 at {}",
            r.t
        );
    }
}

#[test]
fn run_writes_all_artifacts_deterministically() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "probes.pointwise.enabled = true\nprobes.pointwise.samples = 500\n",
    );
    for dir in ["a", "b"] {
        let out = sqg(
            tmp.path(),
            &["run", "--config", &cfg, "--out", dir, "--seed", "7"],
        );
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    for f in ["series.csv", "final.field", "config.toml", "probes.json"] {
        let a = fs::read(tmp.path().join("a").join(f)).unwrap();
        assert_eq!(a, fs::read(tmp.path().join("b").join(f)).unwrap(), "{f}");
    }
    let summary = json(&tmp.path().join("a/summary.json"));
    assert_eq!(summary["status"], "ok");
    assert_eq!(summary["config"]["init"]["seed"], 7);
    let probes = json(&tmp.path().join("a/probes.json"));
    for p in probes.as_array().unwrap() {
        for key in ["inequality_id", "trials", "violations", "min_slack", "seed"] {
            assert!(p.get(key).is_some(), "{key}");
        }
    }
}

#[test]
fn budget_violation_exits_nonzero_with_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "monitors.budget.tolerance = 1e-300\n");
    let out = sqg(tmp.path(), &["run", "--config", &cfg, "--out", "run"]);
    assert_eq!(out.status.code(), Some(1));
    let summary = json(&tmp.path().join("run/summary.json"));
    assert_eq!(summary["status"], "violated");
}

#[test]
fn broken_output_path_leaves_no_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "");
    fs::write(tmp.path().join("blocker"), "").unwrap();
    let out = sqg(
        tmp.path(),
        &["run", "--config", &cfg, "--out", "blocker/run"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("blocker/run"));
    assert!(!tmp.path().join("blocker/run/summary.json").exists());
}

#[test]
fn config_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(sqg(tmp.path(), &["run"]).status.code(), Some(2));
    let cfg = write_config(tmp.path(), "solver.bogus = 1\n");
    let out = sqg(tmp.path(), &["run", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("solver.bogus"));
}

#[test]
fn sweep_writes_member_dirs_and_a_comparative_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("sweep.toml");
    fs::write(
        &cfg,
        BASE.replace("init.amplitude = 0.3", "init.amplitude = [0.1, 0.2, 0.3]"),
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_sqg"))
        .args([
            "sweep",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            "sw",
            "--quiet",
        ])
        .env(sqg_cli::THREADS_ENV, "2")
        .current_dir(tmp.path())
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for i in 0..3 {
        assert!(tmp
            .path()
            .join(format!("sw/run-{i:03}/summary.json"))
            .exists());
    }
    let summary = json(&tmp.path().join("sw/sweep_summary.json"));
    let members = summary["members"].as_array().unwrap();
    assert_eq!(members.len(), 3);
    assert_eq!(members[2]["label"], "init.amplitude=0.3");
    let csv = fs::read_to_string(tmp.path().join("sw/sweep_summary.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);

    let rep = sqg(tmp.path(), &["report", "sw", "--out", "rep", "--quiet"]);
    assert!(
        rep.status.success(),
        "{}",
        String::from_utf8_lossy(&rep.stderr)
    );
    let report = fs::read_to_string(tmp.path().join("rep/report.csv")).unwrap();
    assert_eq!(report.lines().count(), 4);
}

#[test]
fn verify_runs_without_a_document() {
    let tmp = tempfile::tempdir().unwrap();
    let out = sqg(
        tmp.path(),
        &["verify", "--out", "v", "--seed", "3", "--quiet"],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let probes = json(&tmp.path().join("v/probes.json"));
    let ids: Vec<&str> = probes
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["inequality_id"].as_str().unwrap())
        .collect();
    assert!(ids.contains(&"power_subadditivity") && ids.contains(&"algebra"));
    assert!(probes.as_array().unwrap().iter().all(|p| p["seed"] == 3));
}

#[test]
fn picard_and_kato_write_their_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "picard.horizon = 0.05\npicard.iterations = 5\nkato.ks = \"10,100\"\n",
    );
    let out = sqg(
        tmp.path(),
        &["picard", "--config", &cfg, "--out", "p", "--quiet"],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let p = json(&tmp.path().join("p/picard.json"));
    assert_eq!(p["diverged"], false);
    assert_eq!(p["distances"].as_array().unwrap().len(), 5);

    let cal = tmp.path().join("calibrated.toml");
    fs::write(&cal, format!("{BASE}picard.iterations = 5\n")).unwrap();
    let cal = cal.display().to_string();
    let out = sqg(
        tmp.path(),
        &["picard", "--config", &cal, "--out", "pc", "--quiet"],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let p = json(&tmp.path().join("pc/picard.json"));
    assert_eq!(p["calibrated"], true);
    assert!(
        p["horizon"].as_f64().unwrap() <= 0.5 * p["boundary_horizon"].as_f64().unwrap() + 1e-15
    );

    let out = sqg(
        tmp.path(),
        &["kato-compare", "--config", &cfg, "--out", "k", "--quiet"],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let k = json(&tmp.path().join("k/kato.json"));
    assert_eq!(k["rows"].as_array().unwrap().len(), 2);
    assert_eq!(k["strictly_decreasing"], true);
    assert!(fs::read_to_string(tmp.path().join("k/kato.csv"))
        .unwrap()
        .starts_with("k,deviation\n"));
}
