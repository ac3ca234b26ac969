use std::path::PathBuf;
use std::process::{Command, Output};

use egospec::oracle::exact_spectral_radius;
use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

fn egospec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_egospec")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn exact_moments_of_p3() {
    let p3 = fixture("p3.txt");
    let v = json(&egospec(&["moments", "--input", &p3, "--exact", "--k", "3"]));
    let values: Vec<f64> = v["values"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    for (got, want) in values.iter().zip([1.0, 1.0, 5.0 / 3.0, 3.0]) {
        assert!((got - want).abs() < 1e-12);
    }
    assert_eq!(v["K"], 3);
    assert_eq!(v["n"], 3);
}

#[test]
fn planned_sampling_reports_sample_size() {
    let g = fixture("er400.txt");
    let v = json(&egospec(&["moments", "--input", &g, "--radius", "3", "--epsilon", "0.2", "--delta", "0.4", "--seed", "1"]));
    assert_eq!(v["sample_size"], 21);
    assert_eq!(v["provenance"][7], "estimated");
    assert!((v["half_widths"][7].as_f64().unwrap() - 0.2 * 64.0).abs() < 1e-12);
}

#[test]
fn order_beyond_radius_is_a_config_error() {
    let g = fixture("er400.txt");
    let out = egospec(&["moments", "--input", &g, "--radius", "1", "--k", "4"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn exit_code_contract() {
    let out = egospec(&["moments", "--input", &fixture("selfloop.txt"), "--exact", "--k", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let out = egospec(&["moments", "--input", &fixture("missing.txt"), "--exact", "--k", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let out = egospec(&["moments", "--input", &fixture("p3.txt"), "--exact", "--samples", "4", "--radius", "1"]);
    assert_eq!(out.status.code(), Some(3));
    let out = egospec(&["bounds", "--input", &fixture("p3.txt"), "--frobnicate"]);
    assert_eq!(out.status.code(), Some(3));
    let out = egospec(&["plan", "--epsilon", "0.2", "--delta", "1.5"]);
    assert_eq!(out.status.code(), Some(3));
    let out = egospec(&["bounds", "--input", &fixture("k2.txt"), "--radius", "1", "--samples", "5", "--confidence", "1.0"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(egospec(&["--help"]).status.code(), Some(0));
}

#[test]
fn exact_bounds_on_small_graphs() {
    let v = json(&egospec(&["bounds", "--input", &fixture("k2.txt"), "--exact", "--radius", "1"]));
    assert!((v["lower"].as_f64().unwrap() - 2.0).abs() < 1e-6);
    assert!((v["upper"].as_f64().unwrap() - 2.0).abs() < 1e-6);

    let v = json(&egospec(&["bounds", "--input", &fixture("p3.txt"), "--exact", "--radius", "1"]));
    assert!((v["lower"].as_f64().unwrap() - (1.0 + (2.0f64 / 3.0).sqrt())).abs() < 1e-6);
    assert!((v["upper"].as_f64().unwrap() - 2.0).abs() < 1e-6);
    assert_eq!(v["confidence"].as_f64(), Some(1.0));
}

#[test]
fn robust_bounds_carry_confidence_and_bracket_the_radius() {
    let path = fixture("er400.txt");
    let args = ["bounds", "--input", &path, "--radius", "3", "--samples", "600", "--confidence", "0.99", "--seed", "7"];
    let v = json(&egospec(&args));
    assert_eq!(v["confidence"].as_f64(), Some(0.99));
    let text = std::fs::read_to_string(&path).unwrap();
    let lambda = exact_spectral_radius(&egospec::Graph::parse_edge_list(&text).unwrap()).unwrap();
    let (lower, upper) = (v["lower"].as_f64().unwrap(), v["upper"].as_f64().unwrap());
    assert!(lower <= lambda && lambda <= upper, "{lower} <= {lambda} <= {upper}");
}

#[test]
fn identical_flags_give_identical_bytes() {
    let path = fixture("er400.txt");
    let args = ["bounds", "--input", &path, "--radius", "2", "--samples", "200", "--seed", "3"];
    let first = egospec(&args);
    let second = egospec(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn csv_rows_per_order() {
    let out = egospec(&["moments", "--input", &fixture("p3.txt"), "--exact", "--k", "3", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,value,half_width,provenance");
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[4], "3,3.0,0.0,exact");
}

#[test]
fn plan_command() {
    for (eps, delta, want) in [("0.2", "0.4", 21), ("0.08", "0.4", 126)] {
        let v = json(&egospec(&["plan", "--epsilon", eps, "--delta", delta]));
        assert_eq!(v["samples"], want);
    }
}

#[test]
fn in_process_run_writes_report() {
    let mut buf = Vec::new();
    egospec_cli::run(["egospec", "plan", "--epsilon", "0.2", "--delta", "0.4", "--format", "csv"], &mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), "epsilon,delta,samples\n0.20000000000000001,0.40000000000000002,21\n");
}
