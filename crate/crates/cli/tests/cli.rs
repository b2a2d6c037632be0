use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nozzleflow"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run(args: &[&str], cfg: &Path, out: &Path) -> Output {
    bin().args(args).arg("-c").arg(cfg).arg("--out").arg(out).arg("--quiet").output().unwrap()
}

#[test]
fn solve_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = run(&["solve", "--grid", "81x21"], &config("contracting.toml"), out);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for name in ["report.txt", "field.txt"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    let report = fs::read_to_string(a.join("report.txt")).unwrap();
    assert!(report.contains("[checks] all PASS"), "{report}");
}

#[test]
fn grid_override_sets_the_field_size() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["solve", "--grid", "21x7"], &config("straight.toml"), dir.path());
    assert_eq!(o.status.code(), Some(0));
    let rows = fs::read_to_string(dir.path().join("field.txt")).unwrap().lines().count();
    assert_eq!(rows, 1 + 21 * 7);
    let o = run(&["solve", "--grid", "21by7"], &config("straight.toml"), dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn malformed_config_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[geometry]\nkind = \"straight\"\nbogus = 1\n").unwrap();
    let o = run(&["solve"], &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("configuration error"));
}

#[test]
fn subsonic_violation_names_its_condition() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("slow.toml");
    let body = fs::read_to_string(config("straight.toml"))
        .unwrap()
        .replace("mass_flux_factor = 20.0", "mass_flux_factor = 0.5");
    fs::write(&cfg, body).unwrap();
    let o = run(&["solve"], &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("C-INLET-SUBSONIC"));
}

#[test]
fn gamma_ladder_runs_on_a_small_grid() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["limits", "--mode", "gamma", "--grid", "41x11"], &config("incompressible.toml"), dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.contains("PASS LADDER-MONOTONE"), "{report}");
    assert!(dir.path().join("ladder.txt").exists());
}

#[test]
fn asymptotics_reports_a_higher_outlet_pressure_when_expanding() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["asymptotics"], &config("expanding.toml"), dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = fs::read_to_string(dir.path().join("report.txt")).unwrap();
    let value = |key: &str| -> f64 {
        let line =
            report.lines().find(|l| l.starts_with(&format!("{key} = "))).unwrap_or_else(|| panic!("{key} in {report}"));
        line.split(" = ").nth(1).unwrap().parse().unwrap()
    };
    assert!(value("p_plus") > value("p_minus"));
}
