use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_radial-bodies"))
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn square_radial_mean_axis_radius() {
    let dir = TempDir::new().unwrap();
    let body = write(&dir, "square.json", r#"{"type": "cube", "dim": 2}"#);
    let out = run(&["radialmean", "--body", arg(&body), "--p", "1", "--grid", "16"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("index,theta_1,theta_2,value\n"));
    let first = &rows(&csv)[0];
    let r: f64 = first[3].parse().unwrap();
    assert!((r - 0.5).abs() <= 1e-6);
}

#[test]
fn outputs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let body = write(
        &dir,
        "tri.json",
        r#"{"type": "polytope", "vertices": [[0, 0], [1, 0], [0, 1]]}"#,
    );
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = run(&[
            "radialmean",
            "--body",
            arg(&body),
            "--p",
            "-0.25",
            "--mc-samples",
            "2000",
            "--seed",
            "5",
            "--out",
            arg(out),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(
        std::fs::read(a.with_extension("json")).unwrap(),
        std::fs::read(b.with_extension("json")).unwrap()
    );
}

#[test]
fn gaussian_ball_body_radius() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "g.json",
        r#"{"family": "gaussian", "params": {"covariance": [[1, 0], [0, 1]]}}"#,
    );
    let out = run(&["ballbody", "--function", arg(&f), "--p", "2", "--grid", "8"]);
    assert_eq!(out.status.code(), Some(0));
    for row in rows(&String::from_utf8(out.stdout).unwrap()) {
        let r: f64 = row[3].parse().unwrap();
        assert!((r - 2f64.sqrt()).abs() <= 1e-6);
    }
}

#[test]
fn triangle_polar_projection_limit() {
    let dir = TempDir::new().unwrap();
    let body = write(
        &dir,
        "tri.json",
        r#"{"type": "polytope", "vertices": [[0, 0], [1, 0], [0, 1]]}"#,
    );
    let out = run(&["limits", "--body", arg(&body)]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    let row = rows(&csv).into_iter().find(|r| r[0] == "-0.999").unwrap();
    assert_eq!(row[1], "polar-projection-body");
    assert!(row[2].parse::<f64>().unwrap() <= 0.01);
}

#[test]
fn default_suite_fails_only_on_the_limit_checks() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("reports.json");
    let out = run(&["verify", "--suite", "default", "--seed", "7", "--out", arg(&out_path)]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("FAIL"), "{stderr}");
    let reports: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    let reports = reports.as_array().unwrap();
    assert!(reports.len() > 11);
    for r in reports {
        if !r["pass"].as_bool().unwrap() {
            let check = r["check"].as_str().unwrap();
            assert!(check == "limits" || check == "ip-properties", "unexpected failure {r}");
        }
    }
    assert!(reports.iter().all(|r| r.get("runtime").is_none()));

    let again = dir.path().join("again.json");
    run(&["verify", "--suite", "default", "--seed", "7", "--out", arg(&again)]);
    assert_eq!(std::fs::read(&out_path).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn passing_suite_exits_zero() {
    let dir = TempDir::new().unwrap();
    let suite = write(
        &dir,
        "suite.json",
        r#"[{"check": "subadditivity", "instance": {"body": {"type": "cube", "dim": 2}, "p": -0.5, "pairs": 200}}]"#,
    );
    let out = run(&["verify", "--suite", arg(&suite)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8(out.stderr).unwrap().contains("PASS"));
}

#[test]
fn malformed_suite_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let suite = write(&dir, "bad.json", "[{\"check\": \"subadditivity\",\n  \"instance\": }]");
    let out = run(&["verify", "--suite", arg(&suite)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 2"));
}

#[test]
fn small_grid_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let body = write(&dir, "square.json", r#"{"type": "cube", "dim": 2}"#);
    let out = run(&["radialmean", "--body", arg(&body), "--p", "1", "--grid", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn p_at_or_below_minus_one_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let body = write(&dir, "square.json", r#"{"type": "cube", "dim": 2}"#);
    let out = run(&["radialmean", "--body", arg(&body), "--p", "-1"]);
    assert_eq!(out.status.code(), Some(2));
}
