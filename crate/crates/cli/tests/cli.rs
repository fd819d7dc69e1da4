use sato::serial::Json;
use sato::superpoly::{DiffPoly, Var};
use serde_json::Value;
use std::process::{Command, Output};

fn sato(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sato")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let o = sato(&all);
    (serde_json::from_slice(&o.stdout).unwrap(), o.status.code().unwrap())
}

fn entry(v: &Value, key: &str) -> DiffPoly {
    let e = v["entries"].as_array().unwrap().iter().find(|e| e["key"] == key).unwrap();
    DiffPoly::from_json(&e["value"]).unwrap()
}

#[test]
fn wgen_latex_lists_two_block_generators() {
    let o = sato(&["wgen", "--m", "1", "--n", "1", "--N", "2", "--format", "latex"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains(r"\[ w_{11;1} = q_{11} + q_{33} \]"));
    assert!(s.contains(r"\[ w_{21;1} = -q_{21} - q_{43} \]"));
    assert!(s.contains(r"\[ w_{11;0} = q_{11} q_{33} + q_{11}' + q_{21} q_{34} - q_{31} \]"));
    assert!(s.contains(r"\begin{bmatrix}"));
    assert!(!s.contains("FAIL"));
}

#[test]
fn wgen_json_is_deterministic_and_exact() {
    let args = ["wgen", "--m", "1", "--n", "1", "--N", "2", "--format", "json"];
    let (a, b) = (sato(&args), sato(&args));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["passed"], true);
    let q = |i, j, odd| DiffPoly::var(Var::q(i, j, odd));
    assert_eq!(entry(&v, "w1_12"), q(1, 2, true) + q(3, 4, true));
}

#[test]
fn wgen_rejects_order_one() {
    let o = sato(&["wgen", "--N", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("N ≥ 2"));
    assert_eq!(sato(&["check-pvsa", "--m", "0", "--n", "0"]).status.code(), Some(2));
    assert_eq!(sato(&["hierarchy", "--k", "0"]).status.code(), Some(2));
    assert_eq!(sato(&["hierarchy", "--format", "pdf"]).status.code(), Some(2));
}

#[test]
fn reduced_third_flow_system() {
    let o = sato(&["hierarchy", "--m", "1", "--n", "1", "--N", "2", "--k", "3", "--reduced"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let flows: Vec<&str> = s.lines().filter(|l| l.starts_with("d/dt3")).collect();
    assert_eq!(flows.len(), 4);
    assert!(flows.contains(&"d/dt3 u0_11 = 3/2 u0_11 u0_11' + 1/4 u0_11''' - 3/4 u0_12 u0_21' - 3/4 u0_12' u0_21"));
    assert!(!s.contains("u1_"));
    assert!(!s.contains("FAIL"));
}

#[test]
fn first_flow_json() {
    let (v, code) = json(&["hierarchy", "--k", "1"]);
    assert_eq!(code, 0);
    for key in ["d/dt1 u1_11", "d/dt1 u1_12", "d/dt1 u1_21", "d/dt1 u1_22"] {
        assert!(entry(&v, key).is_zero());
    }
    assert!(!entry(&v, "d/dt1 u0_11").is_zero());
}

#[test]
fn pvsa_and_adler_checks_pass() {
    let o = sato(&["check-pvsa", "--m", "1", "--n", "1", "--N", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), 12);
    let o = sato(&["verify-adler", "--m", "1", "--n", "1", "--N", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn bracket_tables() {
    let (v, code) = json(&["brackets", "--m", "1", "--n", "0", "--N", "2", "--kind", "h"]);
    assert_eq!(code, 0);
    let e = v["entries"].as_array().unwrap();
    assert_eq!(e.len(), 4);
    let (w, code) = json(&["brackets", "--m", "1", "--n", "1", "--N", "2"]);
    assert_eq!(code, 0);
    assert!(w["entries"].as_array().unwrap().len() > 16);
}

#[test]
fn lenard_magri_and_conservation() {
    assert_eq!(sato(&["lenard-magri", "--k", "1"]).status.code(), Some(0));
    let o = sato(&["conservation", "--k", "1,3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS flows 1 and 3 commute"));
}

#[test]
fn output_file_and_cache_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let cache = dir.path().join("cache");
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_sato"))
            .args(["hierarchy", "--k", "1", "--format", "json", "--output", out.to_str().unwrap()])
            .env("SATO_CACHE_DIR", &cache)
            .output()
            .unwrap()
    };
    assert_eq!(run().status.code(), Some(0));
    let first = std::fs::read(&out).unwrap();
    let cached: Vec<_> = std::fs::read_dir(&cache).unwrap().flatten().map(|e| e.file_name()).collect();
    assert!(cached.iter().any(|n| n.to_string_lossy() == "root-m1-n1-N2-depth4.json"));
    assert_eq!(run().status.code(), Some(0));
    assert_eq!(std::fs::read(&out).unwrap(), first);
    std::fs::write(cache.join("root-m1-n1-N2-depth4.json"), "{}").unwrap();
    let o = run();
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("ignoring invalid cache entry"));
    assert_eq!(std::fs::read(&out).unwrap(), first);
}

#[test]
fn bad_cached_root_is_ignored() {
    let dir = tempfile::tempdir().unwrap();
    let h = sato::hierarchy::Hierarchy::new(&sato::matop::IndexSet::superset(1, 1), 2).unwrap();
    let wrong = h.l().truncate(-4);
    std::fs::write(dir.path().join("root-m1-n1-N2-depth4.json"), wrong.to_json_string()).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_sato"))
        .args(["hierarchy", "--k", "1"])
        .env("SATO_CACHE_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("ignoring invalid cache entry"));
}
