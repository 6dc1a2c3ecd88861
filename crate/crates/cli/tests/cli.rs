use std::path::Path;
use std::process::{Command, Output};

use dowker_core::io::profile_csv;
use dowker_core::CurvatureProfile;
use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_dowker-lab");

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN).current_dir(dir).args(args).output().expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn json(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&read(dir, name)).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

/// Three unit disks centred on a circle of radius `0.8/√3`.
fn three_disk_config(extra: &str) -> String {
    let h = 0.8 / 3f64.sqrt();
    let (c, s) = (h * 0.5, h * 3f64.sqrt() / 2.0);
    format!(
        "seed = 11\n\n[body]\nkind = \"translates\"\ntranslates = [[0.0, {h}], [{}, {}], [{}, {}]]\n\n{extra}",
        -s,
        -c,
        s,
        -c
    )
}

#[test]
fn dowker_on_three_disk_body() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("k.toml"), three_disk_config("[dowker]\nn_min = 3\nn_max = 7\ngrid = 512\n")).unwrap();
    let out = run(dir.path(), &["dowker", "--config", "k.toml", "--out", "o", "--svg"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let o = dir.path().join("o");
    let csv = read(&o, "dowker.csv");
    assert!(csv.starts_with("n,a_n,second_diff\n"));
    let table = rows(&csv);
    assert_eq!(table.len(), 5);
    let report = json(&o, "dowker.json");
    let area = report["result"]["body_area"].as_f64().unwrap();
    for r in &table[1..4] {
        let d: f64 = r[2].parse().unwrap();
        assert!(d <= 1e-6 * area, "second difference {d}");
    }
    assert_eq!(report["result"]["concave"], true);
    assert!(read(&o, "dowker.svg").starts_with("<svg"));
}

#[test]
fn refinement_demo_hausdorff_is_one_over_n() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["refinement-demo"]);
    assert!(out.status.success());
    let table = rows(&read(dir.path(), "refinement-demo.csv"));
    assert_eq!(table.len(), 999);
    for r in &table {
        let n: f64 = r[0].parse().unwrap();
        let dh: f64 = r[1].parse().unwrap();
        assert!((dh - 1.0 / n).abs() <= 1e-11 / n, "n = {n}: d_H = {dh}");
        assert_eq!(r[2], "inf");
    }
}

#[test]
fn counterexample_report_carries_the_normalized_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["counterexample", "--svg"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(dir.path(), "counterexample.json");
    let v = &report["result"]["violation"];
    assert_eq!(v["violation_found"], true);
    let predicted = v["predicted"].as_f64().unwrap();
    assert!((predicted + 4.0 / 3.0).abs() < 1e-12);
    let first = &v["rows"][0];
    assert_eq!(first["s_bar"].as_f64().unwrap(), 0.003);
    let normalized = first["normalized_ratio"].as_f64().unwrap();
    assert!((normalized / predicted - 1.0).abs() <= 0.10, "{normalized}");
    assert!(report["result"]["pm_distance_to_base"]["value"].as_f64().unwrap() <= 0.05);
    let table = rows(&read(dir.path(), "counterexample.csv"));
    assert_eq!(table.len(), 3);
    assert!(read(dir.path(), "counterexample.svg").starts_with("<svg"));
}

#[test]
fn same_seed_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("k.toml"), three_disk_config("[quadrangle]\nsamples = 30\n\n[derivative_check]\nsamples = 4\n")).unwrap();
    for cmd in ["quadrangle", "derivative-check"] {
        for out in ["a", "b"] {
            assert!(run(dir.path(), &[cmd, "--config", "k.toml", "--out", out]).status.success());
        }
        for ext in ["csv", "json"] {
            let name = format!("{cmd}.{ext}");
            assert_eq!(read(&dir.path().join("a"), &name), read(&dir.path().join("b"), &name), "{name}");
        }
    }
    assert!(run(dir.path(), &["derivative-check", "--config", "k.toml", "--out", "c", "--seed", "12"]).status.success());
    assert_ne!(read(&dir.path().join("a"), "derivative-check.csv"), read(&dir.path().join("c"), "derivative-check.csv"));
    assert_eq!(json(&dir.path().join("c"), "derivative-check.json")["seed"], 12);
}

#[test]
fn report_embeds_config_and_version() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("k.toml"), three_disk_config("[derivative_check]\nsamples = 3\n")).unwrap();
    assert!(run(dir.path(), &["derivative-check", "--config", "k.toml"]).status.success());
    let r = json(dir.path(), "derivative-check.json");
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["version"], dowker_core::VERSION);
    assert_eq!(r["command"], "derivative-check");
    assert_eq!(r["config"]["derivative_check"]["samples"], 3);
    assert_eq!(r["config"]["body"]["translates"].as_array().unwrap().len(), 3);
    assert!(r["error"].is_null());
    assert!(r["result"]["max_relative_error"].as_f64().unwrap() < 1e-4);
}

#[test]
fn config_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("typo.toml"), "seed = 1\n\n[dowker]\nn_min = 3\nnmax = 7\n").unwrap();
    let out = run(dir.path(), &["dowker", "--config", "typo.toml"]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("typo.toml: line 5"), "{msg}");

    std::fs::write(dir.path().join("range.toml"), "[dowker]\nn_min = 3\ngrid = 16\n").unwrap();
    let out = run(dir.path(), &["dowker", "--config", "range.toml"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    std::fs::write(dir.path().join("missing.toml"), "[disk]\nkind = \"profile\"\npath = \"nowhere.csv\"\n").unwrap();
    let out = run(dir.path(), &["reconstruct", "--config", "missing.toml"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    assert!(!dir.path().join("reconstruct.json").exists());
}

#[test]
fn randomized_sweeps_need_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["quadrangle"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));
    assert!(run(dir.path(), &["quadrangle", "--seed", "5"]).status.success());
}

#[test]
fn numeric_failures_land_in_the_json_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("far.toml"), "[body]\nkind = \"translates\"\ntranslates = [[0.0, 0.0], [5.0, 0.0]]\n").unwrap();
    let out = run(dir.path(), &["dowker", "--config", "far.toml"]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(dir.path(), "dowker.json");
    assert!(r["result"].is_null());
    assert!(r["error"].as_str().unwrap().contains("empty"));
    assert!(!dir.path().join("dowker.csv").exists());
}

#[test]
fn profile_disk_is_read_relative_to_the_config() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir(dir.path().join("cfg")).unwrap();
    let profile = CurvatureProfile::circle(2.0).unwrap();
    std::fs::write(dir.path().join("cfg/circle.csv"), profile_csv(&profile, 64)).unwrap();
    std::fs::write(dir.path().join("cfg/run.toml"), "[disk]\nkind = \"profile\"\npath = \"circle.csv\"\n\n[reconstruct]\nsamples = 16\n")
        .unwrap();
    let out = run(dir.path(), &["reconstruct", "--config", "cfg/run.toml"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(dir.path(), "reconstruct.json");
    let length = r["result"]["length"].as_f64().unwrap();
    assert!((length - 4.0 * std::f64::consts::PI).abs() < 1e-9, "{length}");
    let area = r["result"]["area"].as_f64().unwrap();
    assert!((area - 4.0 * std::f64::consts::PI).abs() < 1e-9, "{area}");
    let table = rows(&read(dir.path(), "reconstruct.csv"));
    assert_eq!(table.len(), 16);
    for row in &table {
        let (x, y): (f64, f64) = (row[1].parse().unwrap(), row[2].parse().unwrap());
        assert!((x.hypot(y) - 2.0).abs() < 1e-9);
    }
}
