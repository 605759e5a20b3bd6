use std::path::PathBuf;
use std::process::{Command, Output};

fn grw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grw")).args(args).output().expect("spawn grw")
}

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn cfg(name: &str) -> String {
    configs().join(name).to_string_lossy().into_owned()
}

fn json(path: &std::path::Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn classify_cor42_reports_third() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = grw(&["classify", "--config", &cfg("cor42.toml"), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&out);
    assert_eq!(r["verdict"], "pass");
    let points = r["points"].as_array().unwrap();
    assert!(points.len() >= 5);
    for p in points {
        let fits = p["fits"].as_array().unwrap();
        assert_eq!(fits.len(), 2);
        let a1 = &fits[0];
        assert_eq!(a1["condition"], "A1");
        let l = a1["coefficients"][0].as_f64().unwrap();
        assert!((l - 1.0 / 3.0).abs() < 1e-8);
        assert!(fits[1]["residual"].as_f64().unwrap() <= 1e-8);
        assert_eq!(p["sets"]["in_u"], true);
    }
}

#[test]
fn unknown_warping_family_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cubic.toml");
    let text = std::fs::read_to_string(configs().join("cor42.toml")).unwrap().replace("quadratic", "cubic");
    std::fs::write(&path, text).unwrap();
    let o = grw(&["classify", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cubic"));
}

#[test]
fn missing_config_exits_one() {
    let o = grw(&["classify", "--config", "/nonexistent/grw.toml"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn flat_field_is_vacuous_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = grw(&["classify", "--config", &cfg("flat.toml"), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["verdict"], "pass-with-vacuous");
    assert_eq!(r["points"][0]["fits"][0]["status"], "degenerate");
}

#[test]
fn failing_verdict_exits_two() {
    // D1 with the wrong ea2
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    let text = std::fs::read_to_string(configs().join("jordan_fiber.toml")).unwrap().replace("ea2 = -1.0", "ea2 = 2.0");
    std::fs::write(&path, text).unwrap();
    let o = grw(&["classify", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn classify_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for (out, jobs) in [(&a, "1"), (&b, "4")] {
        let o = grw(&["--jobs", jobs, "classify", "--config", &cfg("jordan_warped.toml"), "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn csv_and_table_formats() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = grw(&["classify", "--config", &cfg("cor42.toml"), "--out", out.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("point,label,condition"));
    assert_eq!(text.lines().count(), 1 + 12);
    assert!(String::from_utf8_lossy(&o.stdout).contains("verdict: pass"));
}

#[test]
fn sweep_quadratic_gives_third_with_zero_trace() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.toml");
    let text = format!(
        "{}\n[sweep]\nx1 = [0.0, 0.5]\ngrid = {{ a = [1.0, 2.0, 3.0] }}\n",
        std::fs::read_to_string(configs().join("cor42.toml")).unwrap().replace("[output]\nformat = \"json\"\n", "")
    );
    std::fs::write(&path, text).unwrap();
    let o = grw(&["sweep", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["a", "x1", "trT", "delta1F_over_4F", "L_A1", "res_A1", "L_GE", "res_GE"]);
    let rows: Vec<Vec<f64>> = rdr
        .records()
        .map(|r| r.unwrap().iter().map(|x| x.parse().unwrap_or(f64::NAN)).collect())
        .collect();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows.iter().map(|r| r[0]).collect::<Vec<_>>(), [1.0, 1.0, 2.0, 2.0, 3.0, 3.0]);
    for r in &rows {
        assert!((r[4] - 1.0 / 3.0).abs() < 1e-8);
        assert!(r[2].abs() < 1e-12);
    }
}

#[test]
fn sweep_exponential_gives_quarter() {
    let o = grw(&["sweep", "--config", &cfg("exponential_sweep.toml")]);
    assert_eq!(o.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 20);
    for r in &rows {
        let tr_t: f64 = r[2].parse().unwrap();
        let l: f64 = r[4].parse().unwrap();
        assert!(tr_t.abs() > 1e-3);
        assert!((l - 0.25).abs() < 1e-6);
    }
}

#[test]
fn empty_sweep_grid_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.toml");
    let text = std::fs::read_to_string(configs().join("exponential_sweep.toml"))
        .unwrap()
        .replace("grid = { b = [1.0, 2.0] }", "grid = { b = [] }");
    std::fs::write(&path, text).unwrap();
    let o = grw(&["sweep", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_single_suite_and_unknown_suite() {
    let o = grw(&["verify", "--suite", "cor42"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("cor42"));
    let o = grw(&["verify", "--suite", "nope"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn help_exits_zero_and_bad_flag_exits_one() {
    assert_eq!(grw(&["--help"]).status.code(), Some(0));
    assert_eq!(grw(&["verify", "--bogus"]).status.code(), Some(1));
}
