use std::process::{Command, Output};

use gft_core::cli::{request_from_report, run, Artifact};
use serde_json::Value;

fn gft(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gft")).args(args).output().expect("gft runs")
}

fn gft_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gft")).args(args).env(key, value).output().expect("gft runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn status(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

const KOEBE: &str = r#"{"family":"koebe"}"#;
const IDENTITY: &str = r#"{"family":"identity"}"#;

#[test]
fn check_reports_a_violated_hypothesis() {
    let out = gft(&["check", "--function", KOEBE, "--criterion", r#"{"kind":"T2_minus","beta":1,"gamma":1}"#]);
    assert_eq!(status(&out), 1);
    let v = json(&out);
    assert_eq!(v["result"]["outcome"], "fails");
    assert!(v["result"]["value"].as_f64().unwrap() >= 8.0);
    assert_eq!(v["result"]["bound"], 0.5);
    assert_eq!(v["input"]["command"], "check");
}

#[test]
fn implication_on_the_identity() {
    let out = gft(&["implication", "--function", IDENTITY, "--criterion", r#"{"kind":"T1","beta":1,"gamma":1,"delta":1}"#]);
    assert_eq!(status(&out), 0);
    let v = json(&out);
    assert_eq!(v["result"]["status"], "consistent");
    assert_eq!(v["result"]["hypothesis"]["holds"], true);
    assert_eq!(v["result"]["conclusion"]["holds"], true);
}

#[test]
fn conclusion_accepts_class_documents() {
    let out = gft(&["conclusion", "--function", KOEBE, "--class", r#"{"kind":"memb_Sstar","alpha":0}"#]);
    assert_eq!(status(&out), 0);
    let v = json(&out);
    let inf = v["result"]["value"].as_f64().unwrap();
    assert!((inf - 0.001 / 1.999).abs() < 1e-8);

    let out = gft(&["conclusion", "--function", r#"{"family":"exp_scaled","a":[0.5,0]}"#, "--class", r#"{"kind":"memb_STS","mu":0.3}"#]);
    assert_eq!(status(&out), 1);
    let onset = json(&out)["result"]["onset_radius"].as_f64().unwrap();
    assert!((onset - 0.908).abs() < 0.01);
}

#[test]
fn conclusion_is_not_applicable_when_f_vanishes() {
    let out = gft(&["conclusion", "--function", r#"{"family":"poly","coeffs":[[0,0],[1,0],[-2,0]]}"#, "--class", r#"{"kind":"memb_Sstar"}"#]);
    assert_eq!(status(&out), 3);
    let v = json(&out);
    assert_eq!(v["result"]["outcome"], "not_applicable");
    assert!(v["result"]["note"].as_str().unwrap().contains("zero"));
}

#[test]
fn jack_probe_on_a_quadratic() {
    let out = gft(&["jack", "--w", r#"{"coeffs":[[0,0],[0.5,0],[0.5,0]]}"#, "--r", "0.9"]);
    assert_eq!(status(&out), 0);
    let v = json(&out);
    let k = v["result"]["k_est"].as_f64().unwrap();
    assert!((k - 2.8 / 1.9).abs() < 1e-6, "{k}");
    assert_eq!(v["result"]["satisfies_lemma"], true);
    let theta = v["result"]["theta"].as_f64().unwrap();
    assert!((0.0..std::f64::consts::TAU).contains(&theta), "{theta}");
}

#[test]
fn jack_on_the_zero_function_is_not_applicable() {
    let out = gft(&["jack", "--w", r#"{"coeffs":[[0,0]]}"#, "--r", "0.5"]);
    assert_eq!(status(&out), 3);
}

#[test]
fn corpus_sweep_is_consistent() {
    let out = gft(&["corpus", "--count", "5", "--seed", "3", "--rho", "0.2"]);
    assert_eq!(status(&out), 0);
    let v = json(&out);
    assert_eq!(v["result"]["aggregate"]["pairs"], 45);
    assert_eq!(v["result"]["aggregate"]["inconsistent"], 0);
    assert_eq!(v["input"]["seed"], 3);
}

#[test]
fn grid_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.csv");
    let scan = r#"{"radius_ladder":[0.5,0.9],"interior_grid":{"radii":4,"angles":8}}"#;
    let out = gft(&["grid", "--function", KOEBE, "--criterion", "reG", "--scan", scan, "--out", path.to_str().unwrap()]);
    assert_eq!(status(&out), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "r,theta,value,flag");
    // radii 0.225, 0.45, 0.5, 0.675, 0.9
    assert_eq!(lines.len(), 1 + 5 * 8);
    let row: Vec<f64> = lines[1].split(',').take(3).map(|x| x.parse().unwrap()).collect();
    assert_eq!(row[0], 0.225);
    assert_eq!(row[1], 0.0);
}

#[test]
fn documents_can_come_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.json");
    std::fs::write(&f, r#"{"family":"quad","c":[0.25,0]}"#).unwrap();
    let out = gft(&["check", "--function", f.to_str().unwrap(), "--criterion", "C1"]);
    assert_eq!(status(&out), 0);
    assert_eq!(json(&out)["input"]["functions"][0]["family"], "quad");

    std::fs::write(&f, "{\n  \"family\": \"quad\",\n  \"c\": oops\n}").unwrap();
    let out = gft(&["check", "--function", f.to_str().unwrap(), "--criterion", "C1"]);
    assert_eq!(status(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("f.json:3:"), "{err}");
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(status(&gft(&["check", "--criterion", "T1"])), 2);
    assert_eq!(status(&gft(&["check", "--function", KOEBE, "--criterion", r#"{"kind":"T9"}"#])), 2);
    assert_eq!(status(&gft(&["check", "--function", KOEBE, "--criterion", r#"{"kind":"T1","beta":1,"gamma":-1,"delta":0}"#])), 2);
    assert_eq!(status(&gft(&["jack", "--w", r#"{"coeffs":[[0,0],[1,0]]}"#, "--r", "1.5"])), 2);
    assert_eq!(status(&gft(&["frobnicate"])), 2);
    assert_eq!(status(&gft(&["check", "--function", KOEBE, "--criterion", "T1", "--scan", r#"{"radius_ladder":[0.9,0.5]}"#])), 2);
}

#[test]
fn reports_replay_bit_identically() {
    let cases: [&[&str]; 3] = [
        &["check", "--function", KOEBE, "--criterion", r#"{"kind":"T2_plus","beta":1,"gamma":1}"#],
        &["jack", "--w", r#"{"coeffs":[[0,0],[0.3,0.1],[0,0.4]]}"#, "--r", "0.99"],
        &["corpus", "--count", "3", "--seed", "11"],
    ];
    for args in cases {
        let out = gft(args);
        let code = status(&out);
        let text = String::from_utf8(out.stdout).unwrap();
        let req = request_from_report(&text).unwrap();
        let again = run(&req).unwrap();
        match again.artifact {
            Artifact::Json(s) => assert_eq!(s, text.trim_end()),
            Artifact::Csv(_) => panic!("expected JSON"),
        }
        assert_eq!(i32::from(again.status), code);
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let args = ["check", "--function", r#"{"family":"poly","coeffs":[[0,0],[1,0],[0.1,0],[-0.05,0]]}"#, "--criterion", r#"{"kind":"T2_minus","beta":-1,"gamma":1}"#];
    let one = gft_env(&args, "GFT_SCAN_THREADS", "1");
    let four = gft_env(&args, "GFT_SCAN_THREADS", "4");
    let auto = gft_env(&args, "GFT_SCAN_THREADS", "0");
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(one.stdout, auto.stdout);
    assert_eq!(status(&gft_env(&args, "GFT_SCAN_THREADS", "many")), 2);
}
