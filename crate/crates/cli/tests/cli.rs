use std::process::{Command, Output};

use approxlab_cli::{run, Cli};
use clap::Parser;
use proptest::prelude::*;

fn approxlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_approxlab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Value at the end of the first text line.
fn last_value(o: &Output) -> f64 {
    stdout(o).lines().next().unwrap().rsplit(' ').next().unwrap().parse().unwrap()
}

fn temp_dir(tag: &str) -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("approxlab-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    d
}

#[test]
fn norm_of_cosine_in_l2() {
    let o = approxlab(&["norm", "--fn", "cosx", "--p", "2"]);
    assert!(o.status.success());
    assert!((last_value(&o) - 0.5f64.sqrt()).abs() < 1e-6);
}

#[test]
fn modulus_of_constant_vanishes() {
    let o = approxlab(&["modulus", "omega", "--fn", "const", "--k", "2", "--t", "0.5"]);
    assert!(o.status.success());
    assert_eq!(last_value(&o), 0.0);
}

#[test]
fn alpha_above_r_fails_with_message() {
    let o = approxlab(&["holder-norm", "--fn", "cosx", "--r", "1", "--alpha", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("0 < alpha <= r"));
}

#[test]
fn unknown_function_is_an_error() {
    let o = approxlab(&["norm", "--fn", "sawtooth"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sawtooth"));
}

#[test]
fn help_lists_every_suite() {
    let o = approxlab(&["--help"]);
    let text = stdout(&o);
    for s in approxlab_experiments::Suite::ALL {
        assert!(text.contains(s.name()) && text.contains(s.checks()), "{}", s.name());
    }
}

#[test]
fn csv_is_reproducible() {
    let args = ["best-approx", "--fn", "triangle", "--p", "0.5", "--n", "3,6", "--grid-size", "512", "--seed", "7", "--format", "csv"];
    let a = approxlab(&args);
    let b = approxlab(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(text.lines().next().unwrap(), "suite,fn,p,r,alpha,k,n,h,quantity,value");
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn config_file_with_flag_override() {
    let dir = temp_dir("config");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.json");
    std::fs::write(&cfg, r#"{"settings": {"functions": ["cosx"], "p": [1]}, "format": "json"}"#).unwrap();
    let o = approxlab(&["norm", "--config", cfg.to_str().unwrap(), "--p", "inf"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 1);
    assert_eq!(v["rows"][0]["p"], "inf");
    assert!((v["rows"][0]["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v["parameters"]["settings"]["functions"][0], "cosx");
}

#[test]
fn verify_writes_reports_and_exits_zero() {
    let dir = temp_dir("verify");
    let o = approxlab(&["verify", "oracles", "--trials", "10", "--out", dir.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("oracles.json")).unwrap()).unwrap();
    assert!(json["verdicts"].as_array().unwrap().iter().all(|v| v["passed"] == true));
    let csv = std::fs::read_to_string(dir.join("oracles.csv")).unwrap();
    assert!(csv.starts_with("suite,fn,p,r,alpha,k,n,h,quantity,value"));
}

#[test]
fn verify_counterexample_at_half() {
    let o = approxlab(&["verify", "counterexample", "--p", "0.5", "--format", "json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["name"], "counterexample");
    assert!(!v["verdicts"].as_array().unwrap().is_empty());
}

#[test]
fn failing_verdict_gives_exit_one() {
    // max/median of E_n / omega_1 is about 5.6 here, above the limit of 3
    let o = approxlab(&["verify", "jackson", "--fn", "triangle", "--p", "0.5", "--k", "1"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("[FAIL] no growth triangle p=0.5 k=1"));
}

fn cli(args: &[&str]) -> Cli {
    Cli::try_parse_from(std::iter::once("approxlab").chain(args.iter().copied())).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn norm_of_constant_is_its_modulus(c in -5.0f64..5.0, p in 0.2f64..6.0) {
        let f = format!("const:{c}");
        let p = p.to_string();
        let out = run(&cli(&["norm", "--fn", &f, "--p", &p, "--grid-size", "64"])).unwrap();
        prop_assert!((out.report.rows[0].value - c.abs()).abs() <= 1e-12 * c.abs().max(1.0));
    }

    #[test]
    fn text_and_json_agree(k in 1usize..4, t in 0.05f64..1.0) {
        let t = t.to_string();
        let k = k.to_string();
        let args = ["modulus", "omega", "--fn", "cosx", "--k", &k, "--t", &t, "--grid-size", "256"];
        let text = run(&cli(&args)).unwrap();
        let json = run(&cli(&[&args[..], &["--format", "json"]].concat())).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json.stdout).unwrap();
        let last = v["rows"].as_array().unwrap().last().unwrap()["value"].as_f64().unwrap();
        let printed: f64 = text.stdout.trim().rsplit(' ').next().unwrap().parse().unwrap();
        prop_assert!((last - printed).abs() < 1e-9);
    }
}
