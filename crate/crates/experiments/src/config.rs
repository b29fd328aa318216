//! Run settings shared by all suites. Every field is optional; each suite
//! fills in its own defaults and records the resolved values in its report.

use std::f64::consts::PI;
use std::path::Path;

use approxlab_core::moduli::{Discretization, HGrid, QuasiNormSpec};
use approxlab_core::spectral::UniformGrid;
use approxlab_core::SolverBudget;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Parses an exponent: a positive number, or `inf`.
pub fn parse_p(s: &str) -> Result<f64> {
    let t = s.trim().to_ascii_lowercase();
    let p = match t.as_str() {
        "inf" | "infinity" | "∞" => f64::INFINITY,
        _ => t.parse::<f64>().map_err(|_| Error::InvalidSetting(format!("cannot parse exponent `{s}`")))?,
    };
    if !(p > 0.0) {
        return Err(Error::InvalidSetting(format!("exponent p must be in (0, inf], got {s}")));
    }
    Ok(p)
}

pub fn norm_spec(p: f64) -> Result<QuasiNormSpec<f64>> {
    if p.is_infinite() {
        Ok(QuasiNormSpec::infinity())
    } else {
        Ok(QuasiNormSpec::new(p)?)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PValue {
    Num(f64),
    Text(String),
}

fn de_p_list<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Vec<f64>>, D::Error> {
    let raw: Option<Vec<PValue>> = Option::deserialize(d)?;
    raw.map(|v| {
        v.into_iter()
            .map(|x| match x {
                PValue::Num(p) if p > 0.0 => Ok(p),
                PValue::Num(p) => Err(format!("exponent p must be positive, got {p}")),
                PValue::Text(s) => parse_p(&s).map_err(|e| e.to_string()),
            })
            .collect::<std::result::Result<Vec<_>, _>>()
    })
    .transpose()
    .map_err(serde::de::Error::custom)
}

fn ser_p_list<S: Serializer>(v: &Option<Vec<f64>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        None => s.serialize_none(),
        Some(ps) => {
            let as_json: Vec<serde_json::Value> = ps
                .iter()
                .map(|p| if p.is_finite() { serde_json::json!(p) } else { serde_json::json!("inf") })
                .collect();
            as_json.serialize(s)
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    /// Catalog names, see `approxlab_core::testfns::lookup`.
    pub functions: Option<Vec<String>>,
    #[serde(deserialize_with = "de_p_list", serialize_with = "ser_p_list")]
    pub p: Option<Vec<f64>>,
    pub r: Option<usize>,
    pub alpha: Option<f64>,
    pub k: Option<Vec<usize>>,
    pub degrees: Option<Vec<usize>>,
    pub kernel: Option<String>,
    pub trials: Option<usize>,
    /// Points of the uniform x-grid.
    pub grid_size: Option<usize>,
    /// Resolution of the geometric h-grid.
    pub per_decade: Option<usize>,
    pub h_min: Option<f64>,
    pub lambda_points: Option<usize>,
    pub seed: u64,
    pub budget: SolverBudget,
}

impl Settings {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Shared discretization: uniform x-grid and geometric h-grid up to `2 pi`.
    pub fn discretization(&self, grid_size: usize, per_decade: usize, h_min: f64) -> Result<Discretization<f64>> {
        let m = self.grid_size.unwrap_or(grid_size);
        let pd = self.per_decade.unwrap_or(per_decade);
        let h_min = self.h_min.unwrap_or(h_min);
        let lambda = self.lambda_points.unwrap_or(64);
        if lambda == 0 {
            return Err(Error::InvalidSetting("lambda_points must be positive".into()));
        }
        Ok(Discretization::new(UniformGrid::new(m)?, HGrid::new(h_min, 2.0 * PI, pd)?, lambda))
    }

    pub fn functions_or(&self, default: &[&str]) -> Vec<String> {
        self.functions.clone().unwrap_or_else(|| default.iter().map(|s| s.to_string()).collect())
    }

    pub fn p_or(&self, default: &[f64]) -> Vec<f64> {
        self.p.clone().unwrap_or_else(|| default.to_vec())
    }

    pub fn k_or(&self, default: &[usize]) -> Vec<usize> {
        self.k.clone().unwrap_or_else(|| default.to_vec())
    }

    pub fn degrees_or(&self, default: &[usize]) -> Vec<usize> {
        self.degrees.clone().unwrap_or_else(|| default.to_vec())
    }

    /// Validates `0 < alpha <= r`.
    pub fn holder_params(&self, r: usize, alpha: f64) -> Result<(usize, f64)> {
        let r = self.r.unwrap_or(r);
        let alpha = self.alpha.unwrap_or(alpha);
        if r == 0 {
            return Err(Error::InvalidSetting("difference order r must be at least 1".into()));
        }
        if !(alpha > 0.0 && alpha <= r as f64) {
            return Err(Error::InvalidSetting(format!(
                "alpha = {alpha} must satisfy 0 < alpha <= r = {r}; for alpha > r the Hölder space contains only constants"
            )));
        }
        Ok((r, alpha))
    }
}

/// JSON description of a discretization for report headers.
pub fn describe_disc(d: &Discretization<f64>) -> serde_json::Value {
    serde_json::json!({
        "grid_size": d.x.size(),
        "h_min": d.h.h_min(),
        "h_max": d.h.h_max(),
        "h_points": d.h.len(),
        "per_decade": d.h.per_decade(),
        "lambda_points": d.lambda_points,
    })
}

/// `p` for JSON output.
pub fn p_json(p: f64) -> serde_json::Value {
    if p.is_finite() {
        serde_json::json!(p)
    } else {
        serde_json::json!("inf")
    }
}
