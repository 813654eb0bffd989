use std::fs;
use std::process::{Command, Output};

use phasegeo::config::RunConfig;

fn phasegeo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phasegeo"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn steiner3_writes_one_energy_row_per_iteration() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let res = phasegeo(&["preset", "run", "steiner3", "--n", "64", "--iters", "500", "--out", out]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let csv = fs::read_to_string(dir.path().join("energy.csv")).unwrap();
    assert_eq!(csv.lines().count(), 501);
    let manifest = fs::read_to_string(dir.path().join("manifest.txt")).unwrap();
    assert!(manifest.contains("name = steiner3"));
    assert!(manifest.contains("time.fmm"));
    assert!(dir.path().join("u_final.pfld").exists());
}

#[test]
fn unknown_preset_is_a_config_error() {
    let res = phasegeo(&["preset", "run", "steinr3"]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("steiner3"));
}

#[test]
fn malformed_config_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "name = x\nmodel = at\ndim = 2\nn = 64\nbogus = 1\n").unwrap();
    let res = phasegeo(&["solve", path.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn every_export_parses_back() {
    let list = String::from_utf8(phasegeo(&["preset", "list"]).stdout).unwrap();
    let names: Vec<&str> = list
        .lines()
        .filter(|l| !l.starts_with(' '))
        .filter_map(|l| l.split_whitespace().next())
        .collect();
    assert!(names.len() >= 10);
    for name in names {
        let res = phasegeo(&["preset", "export", name]);
        assert!(res.status.success(), "{name}");
        let cfg = RunConfig::parse(&String::from_utf8(res.stdout).unwrap()).unwrap();
        assert_eq!(cfg.name, name);
        cfg.build().unwrap();
    }
}

#[test]
fn plateau_disk_produces_a_mesh_and_analysis() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let res = phasegeo(&["preset", "run", "plateau_d1_a", "--n", "32", "--iters", "40", "--out", out]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let obj = fs::read_to_string(dir.path().join("surface.obj")).unwrap();
    assert!(obj.lines().any(|l| l.starts_with("f ")));

    let cfg = dir.path().join("cfg.toml");
    let export = phasegeo(&["preset", "export", "plateau_d1_a"]).stdout;
    let text = String::from_utf8(export).unwrap().replace("n = 64", "n = 32");
    fs::write(&cfg, text).unwrap();
    let field = dir.path().join("u_final.pfld");
    let res = phasegeo(&["analyze", field.to_str().unwrap(), "--config", cfg.to_str().unwrap(), "--dilation", "1.2"]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let stdout = String::from_utf8(res.stdout).unwrap();
    assert!(stdout.contains("separated ="));
    assert!(dir.path().join("coarea.csv").exists());
}
