use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;
use torlab_core::report::Report;

fn torlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_torlab")).args(args).output().expect("binary runs")
}

fn read_report(p: &Path) -> Report {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn toroidal_example_passes() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("t.json");
    let o = torlab(&["verify", "toroidal", "--algebra", "A2", "--n", "1", "--theta", "identity", "--window", "4,3,2", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rep = read_report(&out);
    assert!(rep.all_pass());
    assert_eq!(rep.config["resolved"]["algebra"], "A2");
    assert_eq!(rep.config["resolved"]["window"], "4,3,2");
}

#[test]
fn principal_solves_constants() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("p.json");
    let o = torlab(&["verify", "principal", "--algebra", "A1", "--solve-constants", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rep = read_report(&out);
    assert!(rep.all_pass());
    assert!(rep.notes.iter().any(|n| n.contains("1/4*z4^1")));
    assert!(rep.entries.iter().any(|e| e.relation_id == "prin-constants-solution"));
}

#[test]
fn wrong_constant_exits_one_with_report() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("p.json");
    let o = torlab(&["verify", "principal", "--constants", "1/4", "--window", "3,2,1", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let rep = read_report(&out);
    assert!(rep.summary.fail > 0);
    assert!(rep.failures().all(|e| e.relation_id == "prin-z-commutator"));
}

#[test]
fn unknown_flag_exits_two_without_report() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x.json");
    let o = torlab(&["verify", "toroidal", "--frobnicate", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn config_errors_name_the_key() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x.json");
    let o = torlab(&["verify", "homogeneous", "--window", "3,3", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("`window`"));
    assert!(!out.exists());

    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "[iso]\nsede = 3\n").unwrap();
    let o = torlab(&["verify", "iso", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("`iso.sede`"));
}

#[test]
fn flags_override_config_file() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "samples = 50\n[iso]\nalgebra = \"A3\"\ntheta = \"diagram:2,1,0\"\nseed = 3\n").unwrap();
    let out = dir.path().join("i.json");
    let o = torlab(&["verify", "iso", "--config", cfg.to_str().unwrap(), "--seed", "9", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rep = read_report(&out);
    let r = &rep.config["resolved"];
    assert_eq!((r["algebra"].as_str(), r["seed"].as_u64(), r["samples"].as_u64()), (Some("A3"), Some(9), Some(50)));
}

#[test]
fn reports_are_deterministic_and_round_trip() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let o = torlab(&["verify", "zalg", "--seed", "4", "-o", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let rep: Report = serde_json::from_str(&text).unwrap();
    assert_eq!(format!("{}\n", rep.to_json()), text);
    let sorted = rep.entries.windows(2).all(|w| (&w[0].relation_id, &w[0].params) <= (&w[1].relation_id, &w[1].params));
    assert!(sorted);
}

#[test]
fn structure_dump_is_stable() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        assert_eq!(torlab(&["gen", "--algebra", "A2", "-o", p.to_str().unwrap()]).status.code(), Some(0));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["basis"].as_array().unwrap().len(), 8);
    let first = &v["brackets"][0];
    assert!(first["a"].is_u64() && first["b"].is_u64());
    assert!(first["terms"][0]["sym"].is_string());
    assert!(first["terms"][0]["coeff"]["order"].is_u64());
}

#[test]
fn solve_constants_subcommand() {
    let o = torlab(&["solve-constants", "--algebra", "A1", "--window", "4,0,0"]);
    assert_eq!(o.status.code(), Some(0));
    let rep: Report = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rep.suite, "solve-constants");
    assert_eq!(rep.config["details"]["solutions"].as_array().unwrap().len(), 2);
}
