use std::path::PathBuf;
use std::process::{Command, Output};

fn conelab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conelab")).args(args).env_remove("CONELAB_CONFIG").output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("conelab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn run_null_passes_and_is_reproducible() {
    let a = conelab(&["run", "--suite", "null,energy"]);
    let b = conelab(&["run", "--suite", "null,energy"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.contains("\"c08_null_limit\""));
    assert!(text.contains("\"schema_version\": 1"));
    assert!(!text.contains("runtime"));
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let out = conelab(&["run", "--suite", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown suite"));
}

#[test]
fn bad_arguments_are_usage_errors() {
    assert_eq!(conelab(&["run", "--bogus"]).status.code(), Some(2));
    assert_eq!(conelab(&["asym", "--suite", "null", "--ladder", "4,2"]).status.code(), Some(2));
    assert_eq!(conelab(&["asym", "--suite", "phi", "--ladder", "1,2"]).status.code(), Some(2));
    assert_eq!(conelab(&["dirac-kernel", "--chi", "9"]).status.code(), Some(2));
    assert_eq!(conelab(&["gauge-check", "--k1", "1,2:3"]).status.code(), Some(2));
}

#[test]
fn config_from_env_and_zero_tolerance_fails() {
    let cfg = scratch("strict.toml");
    std::fs::write(&cfg, "[tolerances]\n\"c08_null_limit.far_factor_defect\" = 0.0\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_conelab"))
        .args(["run", "--suite", "null"])
        .env("CONELAB_CONFIG", &cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("far_factor_defect"));
}

#[test]
fn invalid_config_exits_two() {
    let cfg = scratch("bad.toml");
    std::fs::write(&cfg, "[grid]\norder = 2\n").unwrap();
    let out = conelab(&["--config", cfg.to_str().unwrap(), "run", "--suite", "null"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid.order"));
}

#[test]
fn seed_changes_monte_carlo_only() {
    let a = scratch("seed_a.json");
    let b = scratch("seed_b.json");
    for (p, seed) in [(&a, "1"), (&b, "2")] {
        let out = conelab(&["fock", "--check", "energy", "--samples", "20000", "--seed", seed, "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let diff = conelab(&["report", "diff", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(diff.status.code(), Some(1));
    let text = String::from_utf8(diff.stdout).unwrap();
    assert!(text.contains("mc_energy"));
    assert!(!text.contains("\"field\": \"energy\""));
    let same = conelab(&["report", "diff", a.to_str().unwrap(), a.to_str().unwrap()]);
    assert_eq!(same.status.code(), Some(0));
}

#[test]
fn dump_profile_writes_both_csv_layouts() {
    let grid = scratch("grid.csv");
    let out = conelab(&[
        "dump-profile",
        "--profile-family",
        "curl",
        "--grid",
        "4",
        "--omega=-1,0.5",
        "--grid-out",
        grid.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "omega,node,v0_re,v0_im,v1_re,v1_im,v2_re,v2_im,v3_re,v3_im");
    let rows: Vec<&str> = lines.collect();
    let nodes = std::fs::read_to_string(&grid).unwrap().lines().count() - 1;
    assert_eq!(rows.len(), 2 * nodes);
    assert!(rows.iter().all(|r| r.split(',').count() == 10));
    let header = std::fs::read_to_string(&grid).unwrap();
    assert!(header.starts_with("theta,phi_az,weight,v0_re"));
}

#[test]
fn asym_null_reports_rungs() {
    let out = conelab(&["asym", "--suite", "null", "--ladder", "1*4^3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    for r in ["deviation_r1", "deviation_r4", "deviation_r16"] {
        assert!(text.contains(r), "{r}");
    }
    assert!(!text.contains("deviation_r64"));
}

#[test]
fn run_list_names_every_check() {
    let out = conelab(&["run", "--list"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 10);
    assert!(text.contains("c10_determinism"));
}
