use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ablation_fem::mesh::io::read_mesh;

fn ablation(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ablation")).args(args).output().unwrap()
}

fn ok(out: &Output) {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn column<'a>(csv: &'a str, name: &str) -> Vec<&'a str> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == name).unwrap();
    lines.filter(|l| !l.starts_with('#')).map(|l| l.split(',').nth(k).unwrap()).collect()
}

#[test]
fn default_run_is_complete_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "default.json", "{}");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        ok(&ablation(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]));
    }
    let name = "run_BE_V30.0_r1.0.csv";
    let first = fs::read(a.join(name)).unwrap();
    assert_eq!(first, fs::read(b.join(name)).unwrap());
    let text = String::from_utf8(first).unwrap();
    assert_eq!(text.lines().count(), 1201);
    assert_eq!(column(&text, "t_s").last(), Some(&"120.0"));
}

#[test]
fn zero_voltage_csv_stays_at_body_temperature() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "cold.json", r#"{"applied_voltage": 0.0, "t_end": 10.0, "method": "HBE"}"#);
    ok(&ablation(&["run", "--config", &cfg, "--out", dir.path().to_str().unwrap()]));
    let text = fs::read_to_string(dir.path().join("run_HBE_V0.0_r1.0.csv")).unwrap();
    let t = column(&text, "T_max_C");
    assert_eq!(t.len(), 100);
    assert!(t.iter().all(|v| *v == "37.0"), "{t:?}");
}

#[test]
fn plots_and_snapshots_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "snap.json", r#"{"t_end": 2.0, "snapshot_times": [1.0]}"#);
    let out = ablation(&["run", "--config", &cfg, "--out", dir.path().to_str().unwrap(), "--plots"]);
    ok(&out);
    for f in ["run_BE_V30.0_r1.0_lesion.svg", "run_BE_V30.0_r1.0_mesh.txt", "run_BE_V30.0_r1.0_T_1.0s.txt"] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
    let svg = fs::read_to_string(dir.path().join("run_BE_V30.0_r1.0_tmax.svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
}

#[test]
fn malformed_config_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.json", "{\n  \"dt\": 0.1,\n  \"applied_voltag\": 30\n}\n");
    let out = ablation(&["run", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.json") && err.contains("applied_voltag") && err.contains("line 3"), "{err}");

    let cfg = write_config(dir.path(), "neg.json", r#"{"dt": -1}"#);
    let out = ablation(&["run", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("dt"));

    assert!(!ablation(&["sweep", "--group", "heat"]).status.success());
    assert!(!ablation(&["run", "--config", "/nonexistent/cfg.json"]).status.success());
}

#[test]
fn validate_passes() {
    let out = ablation(&["validate"]);
    ok(&out);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 9, "{text}");
    assert!(!text.contains("FAIL "));
}

#[test]
fn mesh_info_and_export() {
    let out = ablation(&["mesh", "--info"]);
    ok(&out);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("nodes") && text.contains("min angle") && text.contains("muscle"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mesh.txt");
    ok(&ablation(&["mesh", "--export", path.to_str().unwrap()]));
    let mesh = read_mesh(&fs::read_to_string(&path).unwrap()).unwrap();
    mesh.validate().unwrap();
    assert!(text.contains(&mesh.node_count().to_string()));

    assert!(!ablation(&["mesh"]).status.success());
}

#[test]
fn sweep_output_does_not_depend_on_job_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "short.json", r#"{"t_end": 40.0}"#);
    let (a, b) = (dir.path().join("j1"), dir.path().join("j2"));
    for (out, jobs) in [(&a, "1"), (&b, "2")] {
        ok(&ablation(&["sweep", "--group", "voltage", "--jobs", jobs, "--config", &cfg, "--out", out.to_str().unwrap()]));
    }
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 9, "{names:?}");
    for n in names {
        assert_eq!(fs::read(a.join(&n)).unwrap(), fs::read(b.join(&n)).unwrap(), "{n:?}");
    }
    let summary = fs::read_to_string(a.join("summary_voltage.csv")).unwrap();
    assert_eq!(summary.lines().count(), 5);
}

#[test]
fn shipped_configs_load() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let default = ablation_fem::experiment::load_config(&dir.join("default.json")).unwrap();
    assert_eq!(default, ablation_fem::bioheat::SimulationConfig::default());
    let hbe = ablation_fem::experiment::load_config(&dir.join("hbe_no_cooling.json")).unwrap();
    assert_eq!(hbe.method, ablation_fem::bioheat::Method::Hbe);
}
