use approxlab_experiments::stats::{rate_fit, ratio_summary, spearman};
use approxlab_experiments::{Report, Settings, Suite};
use proptest::prelude::*;

fn quick() -> Settings {
    Settings { trials: Some(10), ..Default::default() }
}

fn all_asserted_pass(rep: &Report) {
    for v in rep.verdicts.iter().filter(|v| v.asserted) {
        assert!(v.passed, "{}: {}", v.check, v.detail);
    }
}

#[test]
fn names_round_trip() {
    for s in Suite::ALL {
        assert_eq!(Suite::from_name(s.name()).unwrap(), s);
    }
    assert!(Suite::from_name("nope").is_err());
}

#[test]
fn oracles_pass_and_serialize() {
    let rep = Suite::Oracles.run(&quick()).unwrap();
    all_asserted_pass(&rep);
    let json: serde_json::Value = serde_json::from_str(&rep.to_json().unwrap()).unwrap();
    for key in ["name", "checks", "parameters", "rows", "fitted_slopes", "ratio_stats", "verdicts", "notes"] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
    assert_eq!(json["parameters"]["settings"]["trials"], 10);
    let csv = rep.to_csv().unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "suite,fn,p,r,alpha,k,n,h,quantity,value");
    assert_eq!(lines.count(), rep.rows.len());
}

#[test]
fn reports_are_written_and_reproducible() {
    let dir = std::env::temp_dir().join(format!("approxlab-suites-{}", std::process::id()));
    let a = Suite::Stechkin.run(&quick()).unwrap();
    let b = Suite::Stechkin.run(&quick()).unwrap();
    let (json, csv) = a.write(&dir).unwrap();
    assert!(json.ends_with("stechkin.json") && csv.ends_with("stechkin.csv"));
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), b.to_csv().unwrap());
}

#[test]
fn stechkin_passes() {
    all_asserted_pass(&Suite::Stechkin.run(&Settings::default()).unwrap());
}

#[test]
fn rates_pass_on_defaults() {
    let rep = Suite::Rates.run(&Settings::default()).unwrap();
    all_asserted_pass(&rep);
    assert!(!rep.fitted_slopes.is_empty());
}

#[test]
fn modulus_properties_pass_on_a_small_catalog() {
    let s = Settings { functions: Some(vec!["triangle".into(), "lacunary:0.5".into()]), trials: Some(5), ..Default::default() };
    all_asserted_pass(&Suite::ModulusProperties.run(&s).unwrap());
}

#[test]
fn strong_converse_on_lacunary() {
    let rep = Suite::StrongConverse.run(&Settings::default()).unwrap();
    assert!(rep.find_verdict("strong converse lacunary:0.5:10 fejer p=2").unwrap().passed);
}

#[test]
fn alpha_above_r_is_rejected() {
    let s = Settings { alpha: Some(2.0), r: Some(1), ..Default::default() };
    let err = Suite::IntegralCondition.run(&s).unwrap_err().to_string();
    assert!(err.contains("0 < alpha <= r"), "{err}");
}

#[test]
fn unknown_function_is_rejected() {
    let s = Settings { functions: Some(vec!["sawtooth".into()]), ..Default::default() };
    assert!(Suite::Jackson.run(&s).is_err());
}

#[test]
fn settings_load_from_file() {
    let dir = std::env::temp_dir().join(format!("approxlab-settings-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("s.json");
    std::fs::write(&path, r#"{"p": ["inf", 0.5], "k": [2], "seed": 9}"#).unwrap();
    let s = Settings::from_json_file(&path).unwrap();
    assert_eq!(s.p, Some(vec![f64::INFINITY, 0.5]));
    assert_eq!(s.k, Some(vec![2]));
    assert_eq!(s.seed, 9);
}

proptest! {
    #[test]
    fn ratio_summary_orders_its_statistics(v in prop::collection::vec(0.01f64..100.0, 3..12)) {
        let series: Vec<(usize, f64)> = v.iter().enumerate().map(|(i, &x)| (4 << i, x)).collect();
        let st = ratio_summary("r", &series);
        prop_assert!(st.min <= st.median && st.median <= st.max);
        prop_assert!((st.spread - st.max / st.min).abs() <= 1e-12 * st.spread);
        let rho = st.spearman.unwrap();
        prop_assert!((-1.0..=1.0).contains(&rho));
    }

    #[test]
    fn rate_fit_recovers_power_laws(slope in -3.0f64..3.0, c in 0.1f64..10.0) {
        let pts: Vec<(f64, f64)> = (0..8).map(|j| {
            let h = 0.5f64.powi(j);
            (h, c * h.powf(slope))
        }).collect();
        let fit = rate_fit(&pts).unwrap();
        prop_assert!((fit.slope - slope).abs() < 1e-9);
    }

    #[test]
    fn spearman_of_monotone_maps_is_one(v in prop::collection::btree_set(-1000i32..1000, 3..10)) {
        let xs: Vec<f64> = v.iter().map(|&x| x as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x.powi(3) + 2.0).collect();
        prop_assert!((spearman(&xs, &ys).unwrap() - 1.0).abs() < 1e-12);
    }
}
