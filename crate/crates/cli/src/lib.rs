//! Library side of the `approxlab` binary: argument types, config resolution
//! and command dispatch. Every command produces a [`Report`]; the exit status
//! is 0 iff all of its verdicts pass.

mod commands;
pub mod config;

use std::path::PathBuf;

use approxlab_experiments::{Report, Suite};
use clap::builder::{PossibleValue, PossibleValuesParser};
use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use config::{Format, Params, RunConfig};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Experiments(#[from] approxlab_experiments::Error),
    #[error(transparent)]
    Core(#[from] approxlab_core::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    fn is_solver_failure(&self) -> bool {
        use approxlab_core::Error::Solver;
        matches!(self, Error::Core(Solver(_)) | Error::Experiments(approxlab_experiments::Error::Core(Solver(_))))
    }
}

fn suite_list() -> String {
    let mut s = String::from("Suites for `verify`:\n");
    for suite in Suite::ALL {
        s.push_str(&format!("  {:<20} {}\n", suite.name(), suite.checks()));
    }
    s
}

fn suite_parser() -> PossibleValuesParser {
    PossibleValuesParser::new(Suite::ALL.map(|s| PossibleValue::new(s.name()).help(s.checks())))
}

#[derive(Debug, Parser)]
#[command(name = "approxlab", version, about = "Approximation in L_p quasi-norms and Hölder spaces on the circle")]
#[command(after_help = suite_list())]
pub struct Cli {
    #[command(flatten)]
    pub params: Params,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModulusKind {
    /// omega_k(f, t)_p
    Omega,
    /// sup_{h <= t} omega_k(f, h)_p / h^alpha
    Theta,
    /// sup_{h <= t} omega_k(Delta_h^r f, t)_p / h^alpha
    Psi,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// ||f||_p on the uniform grid
    Norm,
    /// A modulus of smoothness at scale --t, with its h-sweep
    Modulus {
        #[arg(value_enum)]
        kind: ModulusKind,
    },
    /// ||f||_p + |f|_{H_p^{r,alpha}}
    HolderNorm,
    /// Best approximation E_n(f)_p, or E_n(f)_H with --holder
    BestApprox {
        /// Approximate in the Hölder norm
        #[arg(long, conflicts_with = "zero_mean")]
        holder: bool,
        /// Only polynomials with zero mean
        #[arg(long)]
        zero_mean: bool,
    },
    /// Errors of kernel means in L_p and H_p^{r,alpha} (shifted families for p < 1)
    Means,
    /// Run a verification suite
    Verify {
        #[arg(value_parser = suite_parser())]
        suite: String,
    },
    /// Log-log slopes of moduli against known exponents
    Rates,
}

/// Result of a command: what to print, which files were written, and the verdict.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub stdout: String,
    pub written: Vec<PathBuf>,
    pub passed: bool,
}

/// Caps the rayon pool at `APPROXLAB_THREADS` when set.
pub fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var("APPROXLAB_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config(format!("APPROXLAB_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Error::Config(e.to_string()))
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let cfg = RunConfig::resolve(&cli.params)?;
    let (report, lines) = match &cli.command {
        Command::Norm => commands::norm(&cfg)?,
        Command::Modulus { kind } => commands::modulus(&cfg, *kind)?,
        Command::HolderNorm => commands::holder_norm(&cfg)?,
        Command::BestApprox { holder, zero_mean } => commands::best_approx(&cfg, *holder, *zero_mean)?,
        Command::Means => commands::means(&cfg)?,
        Command::Verify { suite } => commands::verify(&cfg, Suite::from_name(suite)?)?,
        Command::Rates => commands::verify(&cfg, Suite::Rates)?,
    };
    let mut written = Vec::new();
    if let Some(dir) = &cfg.out {
        std::fs::create_dir_all(dir)?;
        let formats = match cfg.format {
            Some(f) => vec![f],
            None => vec![Format::Json, Format::Csv],
        };
        for f in formats {
            let path = dir.join(format!("{}.{}", report.name, f.extension()));
            std::fs::write(&path, render(&report, f)?)?;
            written.push(path);
        }
    }
    let stdout = match (cfg.format, &cfg.out) {
        (Some(f), None) => render(&report, f)?,
        _ => lines,
    };
    let passed = report.passed();
    Ok(Outcome { report, stdout, written, passed })
}

fn render(report: &Report, f: Format) -> Result<String> {
    Ok(match f {
        Format::Csv => report.to_csv()?,
        Format::Json => report.to_json()? + "\n",
    })
}

/// On a solver failure, writes the resolved configuration and the error next to
/// the reports (or into the temp directory) and returns the path.
pub fn write_trace(cli: &Cli, err: &Error) -> Option<PathBuf> {
    if !err.is_solver_failure() {
        return None;
    }
    let cfg = RunConfig::resolve(&cli.params).ok()?;
    let dir = cfg.out.clone().unwrap_or_else(std::env::temp_dir);
    std::fs::create_dir_all(&dir).ok()?;
    let path = dir.join(format!("approxlab-trace-{}.json", std::process::id()));
    let body = serde_json::json!({
        "command": format!("{:?}", cli.command),
        "config": cfg,
        "error": err.to_string(),
    });
    std::fs::write(&path, serde_json::to_string_pretty(&body).ok()?).ok()?;
    Some(path)
}
