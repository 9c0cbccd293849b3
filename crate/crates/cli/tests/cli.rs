use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clarkflow")).args(args).output().expect("binary runs")
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let out = run(args);
    let code = out.status.code().expect("exit code");
    let v =
        serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)));
    (code, v)
}

fn path(name: &str) -> String {
    data(name).to_str().unwrap().to_string()
}

fn atoms(v: &Value) -> Vec<(f64, f64)> {
    v["atoms"].as_array().unwrap().iter().map(|a| (a["angle"].as_f64().unwrap(), a["mass"].as_f64().unwrap())).collect()
}

#[test]
fn measure_z_squared() {
    let (code, v) = run_json(&["measure", "--map", &path("z2.json"), "--tau", "0", "--grid", "256"]);
    assert_eq!(code, 0);
    let a = atoms(&v);
    assert_eq!(a.len(), 2);
    assert!(a[0].0.abs() < 1e-9 && (a[0].1 - 0.5).abs() < 1e-9);
    assert!((a[1].0 - PI).abs() < 1e-9 && (a[1].1 - 0.5).abs() < 1e-9);
    assert!(v["mass_residual"].as_f64().unwrap() < 1e-4);
    assert_eq!(v["flags"].as_array().unwrap().len(), 0);
}

#[test]
fn measure_identity_is_a_point_mass() {
    let (code, v) = run_json(&["measure", "--map", &path("identity.json"), "--tau", "0", "--grid", "64"]);
    assert_eq!(code, 0);
    let a = atoms(&v);
    assert_eq!(a.len(), 1);
    assert!(a[0].0.abs() < 1e-12 && (a[0].1 - 1.0).abs() < 1e-9);
    assert!(v["density"].as_array().unwrap().iter().all(|d| d.as_f64().unwrap().abs() < 1e-9));
}

#[test]
fn measure_automorphism_has_one_atom() {
    let (code, v) = run_json(&["measure", "--map", &path("auto_half.json"), "--tau", "0", "--grid", "64"]);
    assert_eq!(code, 0);
    let a = atoms(&v);
    assert_eq!(a.len(), 1);
    // dilatation of z ↦ (z + 1/2)/(1 + z/2) at 1 is (1 - 1/4)/(3/2)² = 1/3
    assert!((a[0].1 - 3.0).abs() < 1e-4);
}

#[test]
fn measure_incomplete_exits_2() {
    let (code, v) =
        run_json(&["measure", "--map", &path("hyperbolic_flow.json"), "--tau", "1.5707963", "--grid", "64"]);
    assert_eq!(code, 2);
    assert_eq!(v["flags"][0], "incomplete");
}

#[test]
fn malformed_spec_exits_1() {
    let out = run(&["measure", "--map", &path("malformed.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("schema error"));
    let out = run(&["measure", "--map", &path("does_not_exist.json")]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn measure_csv_rows() {
    let out = run(&["measure", "--map", &path("z2.json"), "--grid", "64", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "kind,index,angle,value");
    assert_eq!(lines.iter().filter(|l| l.starts_with("atom,")).count(), 2);
    assert_eq!(lines.iter().filter(|l| l.starts_with("density,")).count(), 64);
}

#[test]
fn atoms_command() {
    let (code, v) = run_json(&["atoms", "--map", &path("z2.json"), "--tau", "0"]);
    assert_eq!(code, 0);
    let masses: f64 = atoms(&v).iter().map(|a| a.1).sum();
    assert!((masses - 1.0).abs() < 1e-9);
    let out = run(&["atoms", "--map", &path("auto_half.json"), "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn flow_closed_forms() {
    let e = std::f64::consts::E;
    let (code, v) = run_json(&["flow", "--generator", &path("hyperbolic.json"), "--t", "1", "--z", "0,0"]);
    assert_eq!(code, 0);
    assert!((v["value"][0].as_f64().unwrap() - (e - 1.0) / (e + 1.0)).abs() < 1e-8);
    assert!(v["steps"].as_u64().unwrap() > 0);
    assert!(v["max_modulus_seen"].as_f64().unwrap() < 1.0);

    let (_, v) = run_json(&["flow", "--generator", &path("parabolic.json"), "--t", "1", "--z", "0,0"]);
    assert!((v["value"][0].as_f64().unwrap() - 0.5).abs() < 1e-8);

    let (_, v) = run_json(&["flow", "--generator", &path("mixed.json"), "--t", "0", "--z", "-0.3,0.2"]);
    assert_eq!(v["value"][0].as_f64().unwrap(), -0.3);
    assert_eq!(v["value"][1].as_f64().unwrap(), 0.2);
}

#[test]
fn flow_rejects_exterior_points() {
    let out = run(&["flow", "--generator", &path("hyperbolic.json"), "--t", "1", "--z", "1.5,0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn semigroup_check_is_small_and_seeded() {
    let args = ["semigroup-check", "--generator", &path("mixed.json"), "--t", "0.5", "--s", "0.25"];
    let (code, v) = run_json(&args);
    assert_eq!(code, 0);
    assert!(v["max_deviation"].as_f64().unwrap() < 1e-7);
    let (_, w) = run_json(&args);
    assert_eq!(v, w);
    let (_, other) = run_json(&[&args[..], &["--seed", "5"]].concat());
    assert_ne!(v["probes"], other["probes"]);
}

#[test]
fn decompose_canonical_generators() {
    for (name, lambda, p) in [("mixed.json", -1.0, 1.0), ("hyperbolic.json", -1.0, 0.0), ("parabolic.json", 0.0, 1.0)] {
        let (code, v) = run_json(&["decompose", "--generator", &path(name)]);
        assert_eq!(code, 0, "{name}");
        assert!((v["lambda"].as_f64().unwrap() - lambda).abs() < 1e-6, "{name}");
        for s in v["samples"].as_array().unwrap() {
            assert!((s["p"][0].as_f64().unwrap() - p).abs() < 1e-8, "{name}");
            assert!(s["p"][1].as_f64().unwrap().abs() < 1e-8, "{name}");
        }
    }
    let (code, v) = run_json(&["decompose", "--map", &path("hyperbolic_flow.json")]);
    assert_eq!(code, 0);
    assert!((v["lambda"].as_f64().unwrap() + 1.0).abs() < 1e-6);
}

#[test]
fn decompose_without_brfp_exits_4() {
    let out = run(&["decompose", "--generator", &path("parabolic.json"), "--tau", "3.141592653589793"]);
    assert_eq!(out.status.code(), Some(4));
    let out = run(&["decompose", "--map", &path("z2.json")]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn compose_generator_adds_parameters() {
    let (code, v) = run_json(&[
        "compose-generator",
        "--generator",
        &path("hyperbolic.json"),
        "--generator",
        &path("parabolic.json"),
        "--weights",
        "1,2",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["generator"]["lambda"].as_f64().unwrap(), -1.0);
    assert!(v["berkson_porta_min"].as_f64().unwrap() >= -1e-9);
    let out = run(&["compose-generator", "--generator", &path("hyperbolic.json"), "--weights", "1,2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn cowen_pommerenke_equality_cases() {
    let (code, v) = run_json(&["cowen-pommerenke", "--map", &path("z2.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["equality"], true);
    let (_, v) = run_json(&["cowen-pommerenke", "--map", &path("z2.json"), "--points", "0"]);
    assert_eq!(v["equality"], false);
    assert!(v["lhs"].as_f64().unwrap() <= v["rhs"].as_f64().unwrap() + 1e-9);
    let (_, v) = run_json(&["cowen-pommerenke", "--map", &path("auto_half.json"), "--points", "0,1"]);
    assert_eq!(v["equality"], true);
    assert_eq!(v["rejected"].as_array().unwrap().len(), 1);
}

#[test]
fn derivative_measure_single_time() {
    let (code, v) =
        run_json(&["derivative-measure", "--generator", &path("hyperbolic.json"), "--t", "0.25", "--grid", "256"]);
    assert_eq!(code, 0);
    let expected = ((0.25f64).exp() - 1.0) / 0.25;
    assert!((v["atom"].as_f64().unwrap() - expected).abs() < 1e-4);
}

#[test]
fn verify_suites() {
    let (code, v) = run_json(&["verify", "--suite", "nevanlinna"]);
    assert_eq!(code, 0);
    assert_eq!(v["pass"], true);
    let (code, v) = run_json(&["verify", "--suite", "semigroup-law"]);
    assert_eq!(code, 0);
    for row in v["rows"].as_array().unwrap() {
        assert!(row["computed"].as_f64().unwrap() < 1e-7);
    }
    let out = run(&["verify", "--suite", "bogus"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_all_is_deterministic() {
    let a = run(&["verify", "--suite", "all", "--config", &path("empty_config.json")]);
    let b = run(&["verify", "--suite", "all", "--config", &path("empty_config.json")]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn bad_config_exits_1() {
    let out = run(&["verify", "--suite", "mass", "--config", &path("bad_config.json")]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["verify", "--suite", "mass", "--grid", "100"]);
    assert_eq!(out.status.code(), Some(1));
}
