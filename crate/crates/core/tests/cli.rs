use std::path::Path;
use std::process::{Command, Output};

fn lhdef(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lhdef"))
        .args(args)
        .env_remove("LHDEF_TOL_SCALE")
        .output()
        .unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

const SINGLE: &str = r#"
[system]
class = "I5"
z = 0.2

[coefficients]
b1 = { kind = "polynomial", coefficients = [0.5, 1.0] }
b2 = { kind = "constant", value = 0.1 }
b3 = { kind = "constant", value = 0.02 }

[integration]
mode = "single"
t1 = 0.5
dt = 0.01

[output]
seed = 7
"#;

#[test]
fn verify_passes_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.txt");
    let o = lhdef(&[
        "verify",
        "--class",
        "I5",
        "--z",
        "0,0.3",
        "--seed",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.as_bytes(), o.stdout.as_slice());
    assert!(text.lines().last().unwrap().starts_with("overall: PASS"));
}

#[test]
fn verify_fails_under_impossible_tolerance() {
    let o = Command::new(env!("CARGO_BIN_EXE_lhdef"))
        .args(["verify", "P2", "--z", "0.1"])
        .env("LHDEF_TOL_SCALE", "1e-300")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("overall: FAIL"));
}

#[test]
fn configuration_errors_exit_two() {
    assert_eq!(lhdef(&["verify", "--class", "Q7"]).status.code(), Some(2));
    assert_eq!(
        lhdef(&["verify", "P2", "--z", "0.1,abc"]).status.code(),
        Some(2)
    );
    assert_eq!(
        lhdef(&["limit-scan", "P2", "--grid", "0,1,2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        lhdef(&["run", "/nonexistent/scenario.toml"]).status.code(),
        Some(2)
    );
    let bad_scale = Command::new(env!("CARGO_BIN_EXE_lhdef"))
        .args(["verify", "P2"])
        .env("LHDEF_TOL_SCALE", "-1")
        .output()
        .unwrap();
    assert_eq!(bad_scale.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let unknown_key = write_config(
        dir.path(),
        "u.toml",
        &SINGLE.replace("seed = 7", "seed = 7\ncolour = \"red\""),
    );
    assert_eq!(lhdef(&["run", &unknown_key]).status.code(), Some(2));
    let bad_dt = write_config(
        dir.path(),
        "d.toml",
        &SINGLE.replace("dt = 0.01", "dt = -0.01"),
    );
    assert_eq!(lhdef(&["run", &bad_dt]).status.code(), Some(2));
}

#[test]
fn run_is_reproducible_and_honours_out() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "s.toml", SINGLE);
    let a = dir.path().join("a.csv");
    let o = lhdef(&["run", "--config", &cfg, "--out", a.to_str().unwrap()]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let stdout = lhdef(&["run", &cfg]);
    assert_eq!(stdout.status.code(), Some(0));
    let csv = std::fs::read(&a).unwrap();
    assert_eq!(csv, stdout.stdout);
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), "t,x,y,F_z");
    assert_eq!(text.lines().count(), 52);

    let reseeded = write_config(
        dir.path(),
        "r.toml",
        &SINGLE.replace("seed = 7", "seed = 8"),
    );
    assert_ne!(lhdef(&["run", &reseeded]).stdout, stdout.stdout);
}

#[test]
fn relative_output_resolves_against_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "s.toml",
        &SINGLE.replace("seed = 7", "seed = 7\ncsv = \"nested/out.csv\""),
    );
    assert_eq!(lhdef(&["run", &cfg]).status.code(), Some(0));
    assert!(dir.path().join("nested/out.csv").exists());
}

#[test]
fn leaving_the_domain_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "t.toml",
        r#"
[system]
class = "P2"
z = 0.1
[coefficients]
b1 = { kind = "constant", value = 0.0 }
b2 = { kind = "constant", value = 0.0 }
b3 = { kind = "constant", value = 5.0 }
[integration]
mode = "single"
initial = [1.0, 0.1]
t1 = 5.0
dt = 1e-3
"#,
    );
    let out = dir.path().join("t.csv");
    let o = lhdef(&["run", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let rows = std::fs::read_to_string(&out).unwrap().lines().count();
    assert!(rows > 2 && rows < 5002);
}

#[test]
fn limit_scan_grid_and_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.csv");
    let o = lhdef(&[
        "limit-scan",
        "--class",
        "I4",
        "--z",
        "0.1,0.05",
        "--grid",
        "1,2,-1,0,5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.starts_with("z,dev_h1"));

    let default = lhdef(&["limit-scan", "P2"]);
    assert_eq!(default.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&default.stdout).lines().count(), 6);
    assert_eq!(
        lhdef(&["limit-scan", "P2", "--z", "0.05,0.1"])
            .status
            .code(),
        Some(2)
    );
}
