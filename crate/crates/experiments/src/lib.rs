//! Numerical verification suites for approximation in Hölder spaces.
//!
//! Each suite in [`suites`] resolves its [`Settings`], measures the relevant
//! quantities with `approxlab-core`, and returns a [`Report`] with rows, fitted
//! slopes, ratio statistics and pass/fail verdicts.

pub mod config;
pub mod error;
pub mod report;
pub mod stats;
pub mod suites;

pub use config::Settings;
pub use error::{Error, Result};
pub use report::Report;
pub use suites::Suite;
