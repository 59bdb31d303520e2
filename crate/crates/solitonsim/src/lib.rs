//! File formats, concurrent sweeps and the `solitonsim` command-line driver
//! on top of `solitonsim-core`.

// `!(x > 0.0)` is deliberate: it rejects NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::path::Path;

use serde::Serialize;

pub mod commands;
pub mod config;
pub mod csvio;
pub mod error;
pub mod initial;
pub mod json;

pub use commands::{Check, Report};
pub use config::{Command, RunConfig};
pub use error::{AppError, Result};

/// The `summary.json` document.
#[derive(Debug, Serialize)]
pub struct Summary<'a> {
    pub command: Command,
    pub exit_code: i32,
    pub error: Option<String>,
    pub all_checks_pass: bool,
    pub checks: &'a [Check],
    pub max_constraint_drift: f64,
    pub max_tangency_drift: f64,
    pub metrics: &'a std::collections::BTreeMap<String, f64>,
}

/// Runs `command` with the configuration at `config_path` patched by
/// `overrides` (`key=value`) and returns the process exit code.
pub fn run(command: Command, config_path: &Path, overrides: &[String]) -> i32 {
    match run_inner(command, config_path, overrides) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run_inner(command: Command, config_path: &Path, overrides: &[String]) -> Result<i32> {
    let config = config::load(command, config_path, overrides)?;
    let dir = config.output_dir.as_path();
    fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
    json::write(&dir.join("config_echo.json"), &config)?;

    let report = commands::dispatch(&config, dir).unwrap_or_else(|e| Report { failure: Some(e), ..Report::default() });
    let exit_code = report.failure.as_ref().map_or(0, AppError::exit_code);
    let summary = Summary {
        command,
        exit_code,
        error: report.failure.as_ref().map(ToString::to_string),
        all_checks_pass: report.checks.iter().all(|c| c.pass),
        checks: &report.checks,
        max_constraint_drift: report.max_constraint_drift,
        max_tangency_drift: report.max_tangency_drift,
        metrics: &report.metrics,
    };
    json::write(&dir.join("summary.json"), &summary)?;
    if let Some(e) = &report.failure {
        eprintln!("error: {e}");
    }
    for c in report.checks.iter().filter(|c| !c.pass) {
        log::warn!("check {} failed: {}", c.name, json::fmt_f64(c.value));
    }
    Ok(exit_code)
}
