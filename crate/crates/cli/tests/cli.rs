use std::path::PathBuf;
use std::process::{Command, Output};

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("gaitforge-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn gaitforge(args: &[&str], out: &PathBuf) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gaitforge")).args(args).arg("--out").arg(out).output().unwrap()
}

fn json(path: PathBuf) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn usage_errors_exit_2() {
    let out = scratch("usage");
    let bad_config = out.join("bad.toml");
    std::fs::write(&bad_config, "model = \"stokes\"\n").unwrap();
    let cfg = bad_config.to_string_lossy().into_owned();
    for args in [
        vec!["sweep", "--eps-min", "2", "--eps-max", "1"],
        vec!["sweep", "--model-config", &cfg],
        vec!["sweep", "--frame", "sideways"],
        vec!["heightfield", "--window", "1,2,3"],
        vec!["pmp", "--bound", "-1"],
        vec!["pmp", "--no-such-flag"],
    ] {
        let o = gaitforge(&args, &out);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = Command::new(env!("CARGO_BIN_EXE_gaitforge"))
        .args(["sweep", "--eps-step", "0.5", "--out"])
        .arg(&out)
        .env("GAITFORGE_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_writes_all_outputs() {
    let out = scratch("sweep");
    let o = gaitforge(&["sweep", "--eps-step", "0.25", "--seed", "5"], &out);
    assert!(o.status.success());
    let report = json(out.join("sweep.json"));
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["model"]["seed"], 5);
    assert_eq!(report["families"].as_array().unwrap().len(), 2);
    let csv = std::fs::read_to_string(out.join("sweep_circle.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("eps,dx,dy,dtheta"));
    assert!(std::fs::read_to_string(out.join("fig2.svg")).unwrap().starts_with("<svg"));
}

#[test]
fn pmp_success_and_nonconvergence() {
    let out = scratch("pmp");
    let o = gaitforge(&["pmp", "--scan-min", "1.2", "--scan-max", "1.6"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = json(out.join("pmp.json"));
    assert_eq!(report["converged"], true);
    assert!(report["dx"].as_f64().unwrap() > 0.0);
    let gait = std::fs::read_to_string(out.join("gait.csv")).unwrap();
    let rows: Vec<&str> = gait.lines().skip(1).collect();
    let tail = |r: &str| r.split_once(',').unwrap().1.to_string();
    assert_eq!(tail(rows[0]), tail(rows[rows.len() - 1]), "gait.csv is closed");

    let failed = scratch("pmp-reverse");
    let o = gaitforge(&["pmp", "--branch", "reverse", "--scan-min", "1.2", "--scan-max", "1.6"], &failed);
    assert_eq!(o.status.code(), Some(1));
    let report = json(failed.join("pmp.json"));
    assert_eq!(report["converged"], false);
    assert!(report["error"].is_string());
    assert!(!failed.join("gait.csv").exists());
}

#[test]
fn heightfield_reports_contours() {
    let out = scratch("field");
    let o = gaitforge(&["heightfield", "--grid", "81", "--component", "theta"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = json(out.join("heightfield.json"));
    assert_eq!(report["grid"], 81);
    assert_eq!(report["component"], "theta");
    for f in ["heightfield.csv", "contours.csv", "heightfield.svg"] {
        assert!(out.join(f).exists(), "{f}");
    }
    assert!(!out.join("curvature.csv").exists());
}
