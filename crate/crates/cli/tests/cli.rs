use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_topophase");

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(format!("{name}.toml"))
}

fn write_config(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn topophase(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env_remove("TOPOPHASE_THREADS");
    if let Some(t) = threads {
        cmd.env("TOPOPHASE_THREADS", t);
    }
    cmd.output().unwrap()
}

fn run(config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["run", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    topophase(&args, None)
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let idx = lines
        .next()
        .unwrap()
        .split(',')
        .position(|h| h == name)
        .unwrap();
    lines
        .map(|l| l.split(',').nth(idx).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn phase_uncertainty_header() {
    let dir = TempDir::new().unwrap();
    let out = run(&scenario("phase_uncertainty"), dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("phase_uncertainty.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("s,delta_phi,stderr,trials,seed"));
    let summary = fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert!(summary.lines().all(|l| l.contains(" = ")));
    assert!(summary.contains("kind = phase_uncertainty"));
}

#[test]
fn missing_xi_is_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.toml", "kind = \"precession\"\n[coupling]\nmu = 1.0\n");
    let out = run(&cfg, &dir.path().join("o"), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("xi"));
}

#[test]
fn unknown_key_is_named() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "c.toml",
        "kind = \"precession\"\n[coupling]\nxi = 1.0\nxj = 2.0\n",
    );
    let out = run(&cfg, &dir.path().join("o"), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("xj"));
}

#[test]
fn overflow_is_numerical_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "c.toml",
        "kind = \"two_path\"\n[coupling]\nxi = 1e300\nmu = 1.0\nhbar = 1e-10\n\
         [arm_a]\ndelta_theta = 1.0\n[arm_b]\ndelta_theta = -1.0\n",
    );
    let out = run(&cfg, &dir.path().join("o"), &[]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let cfg = scenario("c_pi");
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(run(&cfg, &a, &["--seed", "17"]).status.success());
    assert!(run(&cfg, &b, &["--seed", "17"]).status.success());
    assert_eq!(
        fs::read(a.join("c_pi.csv")).unwrap(),
        fs::read(b.join("c_pi.csv")).unwrap()
    );
    assert_eq!(
        fs::read(a.join("summary.txt")).unwrap(),
        fs::read(b.join("summary.txt")).unwrap()
    );
}

#[test]
fn seed_override_changes_sampling() {
    let dir = TempDir::new().unwrap();
    let cfg = scenario("c_pi");
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(run(&cfg, &a, &["--seed", "1"]).status.success());
    assert!(run(&cfg, &b, &["--seed", "2"]).status.success());
    assert_ne!(
        fs::read(a.join("c_pi.csv")).unwrap(),
        fs::read(b.join("c_pi.csv")).unwrap()
    );
}

#[test]
fn thread_cap_does_not_change_output() {
    let dir = TempDir::new().unwrap();
    let cfg = scenario("topological_vs_uniform");
    let args = |out: &Path| {
        vec![
            "run".to_string(),
            cfg.to_str().unwrap().to_string(),
            "--out".to_string(),
            out.to_str().unwrap().to_string(),
        ]
    };
    let one = dir.path().join("one");
    let many = dir.path().join("many");
    let a1 = args(&one);
    let a2 = args(&many);
    let refs1: Vec<&str> = a1.iter().map(String::as_str).collect();
    let refs2: Vec<&str> = a2.iter().map(String::as_str).collect();
    assert!(topophase(&refs1, Some("1")).status.success());
    assert!(topophase(&refs2, None).status.success());
    let file = "topological_vs_uniform.csv";
    assert_eq!(fs::read(one.join(file)).unwrap(), fs::read(many.join(file)).unwrap());
}

#[test]
fn bad_thread_cap_is_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = scenario("precession");
    let out = topophase(
        &["run", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()],
        Some("zero"),
    );
    assert_eq!(out.status.code(), Some(2));
}

fn sweep(config: &Path, param: &str, values: &str, out: &Path) -> Output {
    topophase(
        &[
            "sweep",
            config.to_str().unwrap(),
            "--param",
            param,
            "--values",
            values,
            "--out",
            out.to_str().unwrap(),
        ],
        None,
    )
}

#[test]
fn unknown_sweep_param_is_config_error() {
    let dir = TempDir::new().unwrap();
    let out = sweep(&scenario("decohere_sweep"), "pointer.bogus", "1,2", dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("pointer.bogus"));
}

#[test]
fn empty_sweep_writes_header_only() {
    let dir = TempDir::new().unwrap();
    let out = sweep(&scenario("phase_uncertainty"), "pointer.s", "", dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("sweep_pointer.s.csv")).unwrap();
    assert_eq!(csv, "pointer.s,s,delta_phi,stderr,trials,seed\n");
}

#[test]
fn pointer_sweep_lowers_visibility() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "d.toml",
        "kind = \"decohere_sweep\"\ntrials = 200\nspin = \"up\"\n[coupling]\nxi = 1.0\n\
         [arm_a]\nrotation = 1.5707963267948966\n[arm_b]\nrotation = -1.5707963267948966\n\
         [measurement]\nobservable = \"x\"\n",
    );
    let out = sweep(&cfg, "pointer.s", "0,0.5,1,2,4", &dir.path().join("o"));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("o/sweep_pointer.s.csv")).unwrap();
    let v = column(&csv, "visibility");
    assert_eq!(v.len(), 5);
    assert!((v[0] - 1.0).abs() < 1e-12);
    assert!(v.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{v:?}");
    assert!(v[4] < 0.01);
}

#[test]
fn precession_sweep_is_linear_in_sweep_angle() {
    let dir = TempDir::new().unwrap();
    let out = sweep(
        &scenario("precession"),
        "trajectory.delta_theta",
        "0.1,0.2,0.3,-0.4",
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("sweep_trajectory.delta_theta.csv")).unwrap();
    let x = column(&csv, "trajectory.delta_theta");
    let phase = column(&csv, "phase");
    for (x, p) in x.iter().zip(&phase) {
        assert!((p - x).abs() < 1e-12, "{x} {p}");
    }
}

#[test]
fn fractional_integer_param_is_rejected() {
    let dir = TempDir::new().unwrap();
    let out = sweep(&scenario("phase_uncertainty"), "trials", "10.5", dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn every_sample_scenario_runs() {
    let dir = TempDir::new().unwrap();
    for name in [
        "precession",
        "two_path",
        "verify_c",
        "decohere_sweep",
        "c_pi",
        "topological_vs_uniform",
        "scalar_ab",
        "duality",
    ] {
        let out_dir = dir.path().join(name);
        let out = run(&scenario(name), &out_dir, &["--seed", "3"]);
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let csv = fs::read_to_string(out_dir.join(format!("{name}.csv"))).unwrap();
        assert!(csv.lines().count() >= 2, "{name}");
    }
}
