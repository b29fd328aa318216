//! Reports: measured rows, fitted slopes, ratio statistics and verdicts.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Serialize, Serializer};

use crate::error::Result;

/// Writes non-finite numbers as strings so that JSON stays valid.
pub(crate) fn ser_num<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str(&format!("{v}"))
    }
}

pub(crate) fn ser_opt_num<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => ser_num(x, s),
        None => s.serialize_none(),
    }
}

/// Quantities that are moduli evaluated at `1/n`.
const MODULUS_QUANTITIES: [&str; 7] = ["omega", "omega_r", "w_p", "w_H", "theta_k", "theta_r", "psi"];
const MONOTONE_TOL: f64 = 1e-9;
const MONOTONE_FLOOR: f64 = 1e-12;

/// One measurement. Columns match the flat CSV schema.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub suite: String,
    #[serde(rename = "fn")]
    pub func: String,
    #[serde(serialize_with = "ser_opt_num")]
    pub p: Option<f64>,
    pub r: Option<usize>,
    #[serde(serialize_with = "ser_opt_num")]
    pub alpha: Option<f64>,
    pub k: Option<usize>,
    pub n: Option<usize>,
    #[serde(serialize_with = "ser_opt_num")]
    pub h: Option<f64>,
    pub quantity: String,
    #[serde(serialize_with = "ser_num")]
    pub value: f64,
}

/// Builder for rows sharing a suite and function.
#[derive(Clone, Debug, Default)]
pub struct RowKey {
    pub suite: String,
    pub func: String,
    pub p: Option<f64>,
    pub r: Option<usize>,
    pub alpha: Option<f64>,
    pub k: Option<usize>,
    pub n: Option<usize>,
    pub h: Option<f64>,
}

impl RowKey {
    pub fn new(suite: &str, func: &str) -> Self {
        Self { suite: suite.into(), func: func.into(), ..Default::default() }
    }
    pub fn p(mut self, p: f64) -> Self {
        self.p = Some(p);
        self
    }
    pub fn r(mut self, r: usize) -> Self {
        self.r = Some(r);
        self
    }
    pub fn alpha(mut self, a: f64) -> Self {
        self.alpha = Some(a);
        self
    }
    pub fn k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }
    pub fn n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }
    pub fn h(mut self, h: f64) -> Self {
        self.h = Some(h);
        self
    }
    pub fn row(&self, quantity: &str, value: f64) -> Row {
        Row {
            suite: self.suite.clone(),
            func: self.func.clone(),
            p: self.p,
            r: self.r,
            alpha: self.alpha,
            k: self.k,
            n: self.n,
            h: self.h,
            quantity: quantity.into(),
            value,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlopeFit {
    pub label: String,
    #[serde(serialize_with = "ser_num")]
    pub slope: f64,
    #[serde(serialize_with = "ser_num")]
    pub intercept: f64,
    #[serde(serialize_with = "ser_num")]
    pub residual: f64,
    #[serde(serialize_with = "ser_opt_num")]
    pub expected: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioSummary {
    pub label: String,
    pub count: usize,
    #[serde(serialize_with = "ser_num")]
    pub min: f64,
    #[serde(serialize_with = "ser_num")]
    pub max: f64,
    #[serde(serialize_with = "ser_num")]
    pub median: f64,
    /// `max / min`.
    #[serde(serialize_with = "ser_num")]
    pub spread: f64,
    #[serde(serialize_with = "ser_num")]
    pub max_over_median: f64,
    /// Rank correlation of the ratio with `n`, when ordered by `n`.
    #[serde(serialize_with = "ser_opt_num")]
    pub spearman: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub check: String,
    pub passed: bool,
    /// Observational checks are reported but do not affect the exit status.
    pub asserted: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub name: String,
    /// What the suite checks.
    pub checks: String,
    pub parameters: serde_json::Value,
    pub rows: Vec<Row>,
    pub fitted_slopes: Vec<SlopeFit>,
    pub ratio_stats: Vec<RatioSummary>,
    pub verdicts: Vec<Verdict>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(name: &str, checks: &str, parameters: serde_json::Value) -> Self {
        Self {
            name: name.into(),
            checks: checks.into(),
            parameters,
            rows: Vec::new(),
            fitted_slopes: Vec::new(),
            ratio_stats: Vec::new(),
            verdicts: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn verdict(&mut self, check: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.verdicts.push(Verdict { check: check.into(), passed, asserted: true, detail: detail.into() });
    }

    pub fn observe(&mut self, check: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.verdicts.push(Verdict { check: check.into(), passed, asserted: false, detail: detail.into() });
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// All asserted verdicts pass.
    pub fn passed(&self) -> bool {
        self.verdicts.iter().filter(|v| v.asserted).all(|v| v.passed)
    }

    pub fn find_verdict(&self, check: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.check == check)
    }

    pub fn rows_for(&self, quantity: &str) -> impl Iterator<Item = &Row> {
        let q = quantity.to_string();
        self.rows.iter().filter(move |r| r.quantity == q)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Flat CSV: header row, then one measurement per row.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        if self.rows.is_empty() {
            w.write_record(["suite", "fn", "p", "r", "alpha", "k", "n", "h", "quantity", "value"])?;
        }
        for row in &self.rows {
            w.serialize(row)?;
        }
        let bytes = w.into_inner().map_err(|e| crate::error::Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Writes `<name>.json` and `<name>.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir)?;
        let json = dir.join(format!("{}.json", self.name));
        let csv = dir.join(format!("{}.csv", self.name));
        fs::write(&json, self.to_json()?)?;
        fs::write(&csv, self.to_csv()?)?;
        Ok((json, csv))
    }

    /// Adds a verdict that best approximations are nonincreasing in `n` and
    /// moduli nondecreasing in their scale `1/n`, if the report has such rows.
    pub fn check_monotonicity(&mut self) {
        use std::collections::BTreeMap;
        let tracked = |q: &str| q.starts_with("E_n") || MODULUS_QUANTITIES.contains(&q);
        let mut groups: BTreeMap<String, Vec<(usize, f64)>> = BTreeMap::new();
        for row in &self.rows {
            if let (Some(n), true) = (row.n, tracked(&row.quantity)) {
                let key = format!("{} {} p={:?} r={:?} alpha={:?} k={:?}", row.quantity, row.func, row.p, row.r, row.alpha, row.k);
                groups.entry(key).or_default().push((n, row.value));
            }
        }
        if groups.is_empty() {
            return;
        }
        let mut broken = Vec::new();
        for (key, mut v) in groups {
            v.sort_by_key(|x| x.0);
            for w in v.windows(2) {
                if w[1].1 > w[0].1 * (1.0 + MONOTONE_TOL) + MONOTONE_FLOOR {
                    broken.push(format!("{key} at n={}: {:.6e} > {:.6e}", w[1].0, w[1].1, w[0].1));
                }
            }
        }
        let detail = if broken.is_empty() {
            "E_n nonincreasing and moduli nonincreasing in n".to_string()
        } else {
            broken.join("; ")
        };
        self.verdict("monotone in n", broken.is_empty(), detail);
    }

    /// Human-readable verdict lines.
    pub fn summary(&self) -> String {
        let mut s = format!("{}: {}\n", self.name, if self.passed() { "PASS" } else { "FAIL" });
        for v in &self.verdicts {
            let tag = match (v.asserted, v.passed) {
                (true, true) => "pass",
                (true, false) => "FAIL",
                (false, true) => "info",
                (false, false) => "info!",
            };
            s.push_str(&format!("  [{tag}] {}: {}\n", v.check, v.detail));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monotonicity_meta_check() {
        let mut rep = Report::new("demo", "nothing", serde_json::json!({}));
        rep.check_monotonicity();
        assert!(rep.verdicts.is_empty());
        for (n, v) in [(4, 0.5), (8, 0.25), (16, 0.3)] {
            rep.rows.push(RowKey::new("demo", "f").p(1.0).n(n).row("E_n", v));
        }
        rep.check_monotonicity();
        assert!(!rep.passed());
        assert!(rep.verdicts[0].detail.contains("n=16"));
    }

    #[test]
    fn csv_schema_and_infinities() {
        let mut rep = Report::new("demo", "nothing", serde_json::json!({}));
        rep.rows.push(RowKey::new("demo", "cosx").p(f64::INFINITY).n(4).row("E_n", 0.25));
        rep.rows.push(RowKey::new("demo", "cosx").h(0.1).row("tail", f64::INFINITY));
        let csv = rep.to_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "suite,fn,p,r,alpha,k,n,h,quantity,value");
        assert_eq!(lines.next().unwrap(), "demo,cosx,inf,,,,4,,E_n,0.25");
        assert_eq!(lines.next().unwrap(), "demo,cosx,,,,,,0.1,tail,inf");
        let json: serde_json::Value = serde_json::from_str(&rep.to_json().unwrap()).unwrap();
        assert_eq!(json["rows"][0]["p"], "inf");
        assert_eq!(json["rows"][0]["fn"], "cosx");
    }

    #[test]
    fn observational_verdicts_do_not_fail() {
        let mut rep = Report::new("demo", "nothing", serde_json::json!({}));
        rep.observe("open question", false, "data only");
        assert!(rep.passed());
        rep.verdict("real check", false, "broken");
        assert!(!rep.passed());
        assert!(rep.summary().contains("[FAIL] real check"));
    }

    #[test]
    fn empty_report_still_has_header() {
        let rep = Report::new("demo", "nothing", serde_json::json!({}));
        assert_eq!(rep.to_csv().unwrap().trim(), "suite,fn,p,r,alpha,k,n,h,quantity,value");
    }
}
