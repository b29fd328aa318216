use std::path::PathBuf;

use approxlab_experiments::config::parse_p;
use approxlab_experiments::Settings;
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Flags shared by every subcommand. Each one overrides the config file.
#[derive(Clone, Debug, Default, Args)]
pub struct Params {
    /// JSON run configuration (`{"settings": {...}, "t": .., "out": .., "format": ..}`)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for report files
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Report format: printed to stdout, or the only file written with --out
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Catalog functions, comma separated (const, cosx, triangle, odd-harmonic:1, lacunary:0.5, ...)
    #[arg(long = "fn", value_delimiter = ',', global = true)]
    pub functions: Vec<String>,
    /// Exponents in (0, inf], comma separated
    #[arg(long, value_delimiter = ',', global = true)]
    pub p: Vec<String>,
    /// Order of the Hölder difference
    #[arg(long, global = true)]
    pub r: Option<usize>,
    /// Hölder exponent, 0 < alpha <= r
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Orders of the moduli, comma separated
    #[arg(long, value_delimiter = ',', global = true)]
    pub k: Vec<usize>,
    /// Polynomial degrees, comma separated
    #[arg(long, value_delimiter = ',', global = true)]
    pub n: Vec<usize>,
    /// Scale of a modulus
    #[arg(long, global = true)]
    pub t: Option<f64>,
    /// Kernel: dirichlet, fejer or vp
    #[arg(long, global = true)]
    pub kernel: Option<String>,
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Points of the uniform x-grid (M)
    #[arg(long, global = true)]
    pub grid_size: Option<usize>,
    /// Steps per decade of the geometric h-grid
    #[arg(long, global = true)]
    pub per_decade: Option<usize>,
    /// Smallest step of the h-grid
    #[arg(long, global = true)]
    pub h_min: Option<f64>,
    /// Shifts lambda averaged over for p < 1
    #[arg(long, global = true)]
    pub lambda_points: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Solver restarts for p < 1
    #[arg(long, global = true)]
    pub starts: Option<usize>,
    /// Solver iteration cap per smoothing stage
    #[arg(long, global = true)]
    pub max_iter: Option<usize>,
}

/// Resolved configuration: the config file with the flags applied on top.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub settings: Settings,
    pub t: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn resolve(params: &Params) -> Result<Self> {
        let mut cfg = match &params.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
                serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
            }
            None => RunConfig::default(),
        };
        cfg.apply(params)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, a: &Params) -> Result<()> {
        let s = &mut self.settings;
        if !a.functions.is_empty() {
            s.functions = Some(a.functions.clone());
        }
        if !a.p.is_empty() {
            s.p = Some(a.p.iter().map(|p| parse_p(p)).collect::<std::result::Result<_, _>>()?);
        }
        if !a.k.is_empty() {
            s.k = Some(a.k.clone());
        }
        if !a.n.is_empty() {
            s.degrees = Some(a.n.clone());
        }
        s.r = a.r.or(s.r);
        s.alpha = a.alpha.or(s.alpha);
        s.kernel = a.kernel.clone().or(s.kernel.take());
        s.trials = a.trials.or(s.trials);
        s.grid_size = a.grid_size.or(s.grid_size);
        s.per_decade = a.per_decade.or(s.per_decade);
        s.h_min = a.h_min.or(s.h_min);
        s.lambda_points = a.lambda_points.or(s.lambda_points);
        if let Some(seed) = a.seed {
            s.seed = seed;
            s.budget.seed = seed;
        }
        if let Some(v) = a.starts {
            s.budget.starts = v;
        }
        if let Some(v) = a.max_iter {
            s.budget.max_iter = v;
        }
        self.t = a.t.or(self.t);
        self.out = a.out.clone().or(self.out.take());
        self.format = a.format.or(self.format);
        Ok(())
    }

    /// Checks the preconditions shared by all commands.
    fn validate(&self) -> Result<()> {
        let s = &self.settings;
        if let Some(ps) = &s.p {
            if let Some(p) = ps.iter().find(|p| !(**p > 0.0)) {
                return Err(Error::Config(format!("exponent p must be in (0, inf], got {p}")));
            }
        }
        if s.k.as_ref().is_some_and(|k| k.contains(&0)) {
            return Err(Error::Config("difference order k must be at least 1".into()));
        }
        if s.r == Some(0) {
            return Err(Error::Config("difference order r must be at least 1".into()));
        }
        if s.r.is_some() || s.alpha.is_some() {
            s.holder_params(1, 0.5)?;
        }
        if let Some(t) = self.t {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Config(format!("scale t must be positive, got {t}")));
            }
        }
        if s.grid_size.is_some_and(|m| m < 8 || !m.is_power_of_two()) {
            return Err(Error::Config("grid size must be a power of two, at least 8".into()));
        }
        if s.per_decade == Some(0) || s.lambda_points == Some(0) {
            return Err(Error::Config("per-decade and lambda-points must be positive".into()));
        }
        if let Some(h) = s.h_min {
            if !(h > 0.0 && h < 2.0 * std::f64::consts::PI) {
                return Err(Error::Config(format!("h-min must lie in (0, 2 pi), got {h}")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_values() {
        let dir = std::env::temp_dir().join(format!("approxlab-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.json");
        std::fs::write(&path, r#"{"settings": {"p": [1, "inf"], "r": 2, "seed": 3}, "t": 0.25}"#).unwrap();
        let params = Params { config: Some(path), p: vec!["0.5".into()], ..Default::default() };
        let cfg = RunConfig::resolve(&params).unwrap();
        assert_eq!(cfg.settings.p, Some(vec![0.5]));
        assert_eq!(cfg.settings.r, Some(2));
        assert_eq!(cfg.settings.seed, 3);
        assert_eq!(cfg.t, Some(0.25));
    }

    #[test]
    fn alpha_above_r_is_rejected() {
        let params = Params { r: Some(1), alpha: Some(1.5), ..Default::default() };
        let err = RunConfig::resolve(&params).unwrap_err().to_string();
        assert!(err.contains("0 < alpha <= r"), "{err}");
    }

    #[test]
    fn bad_values_name_the_precondition() {
        let cases = [
            (Params { p: vec!["-1".into()], ..Default::default() }, "exponent"),
            (Params { k: vec![0], ..Default::default() }, "difference order k"),
            (Params { grid_size: Some(100), ..Default::default() }, "power of two"),
            (Params { t: Some(0.0), ..Default::default() }, "scale t"),
        ];
        for (params, needle) in cases {
            let err = RunConfig::resolve(&params).unwrap_err().to_string();
            assert!(err.contains(needle), "{err}");
        }
    }
}
