//! The seven commands. Each returns a [`Report`]; [`crate::run`] turns it
//! into `summary.json` and an exit code.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use solitonsim_core::evolver::{check_energy_inequality, check_nonincreasing, EvolveOutcome, SolverConfig};
use solitonsim_core::verify::ResidualReport;

use crate::config::{Command, RunConfig};
use crate::error::{AppError, Result};

mod evolve;
mod geometry;
mod ishimori;
mod profile;
mod reduction;
mod refine;
mod sweep;

/// Convergence orders are accepted in this band around 2.
pub const ORDER_BAND: (f64, f64) = (1.7, 2.3);
/// Relative Hamiltonian drift accepted for undamped runs.
pub const HAMILTONIAN_REL_TOL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
}

/// What a command found, before it is written out.
#[derive(Debug, Default)]
pub struct Report {
    pub checks: Vec<Check>,
    pub metrics: BTreeMap<String, f64>,
    pub max_constraint_drift: f64,
    pub max_tangency_drift: f64,
    /// Set when the numerics gave up part way; the rest of the report
    /// describes what was computed before that.
    pub failure: Option<AppError>,
}

impl Report {
    pub fn check(&mut self, name: &str, value: f64, min: Option<f64>, max: Option<f64>) -> bool {
        let pass = value.is_finite() && min.is_none_or(|m| value >= m) && max.is_none_or(|m| value <= m);
        self.checks.push(Check { name: name.to_owned(), pass, value, min, max });
        pass
    }

    pub fn at_most(&mut self, name: &str, value: f64, max: f64) -> bool {
        self.check(name, value, None, Some(max))
    }

    pub fn at_least(&mut self, name: &str, value: f64, min: f64) -> bool {
        self.check(name, value, Some(min), None)
    }

    pub fn in_band(&mut self, name: &str, value: f64, (lo, hi): (f64, f64)) -> bool {
        self.check(name, value, Some(lo), Some(hi))
    }

    pub fn metric(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.to_owned(), value);
    }

    pub fn drifts(&mut self, constraint: f64, tangency: f64) {
        self.max_constraint_drift = self.max_constraint_drift.max(constraint);
        self.max_tangency_drift = self.max_tangency_drift.max(tangency);
    }

    /// The checks every evolution gets: constraint and tangency drift within
    /// the configured tolerances, and the energy law for its viscosity.
    pub fn evolution(&mut self, prefix: &str, out: &EvolveOutcome<3>, config: &SolverConfig) {
        let name = |s: &str| if prefix.is_empty() { s.to_owned() } else { format!("{prefix}.{s}") };
        let c = out.ledger.iter().map(|r| r.constraint_drift).fold(0.0, f64::max);
        let t = out.ledger.iter().map(|r| r.tangency_drift).fold(0.0, f64::max);
        self.drifts(c, t);
        self.at_most(&name("constraint_drift"), c, config.constraint_tol);
        self.at_most(&name("tangency_drift"), t, config.tangency_tol);
        let h0 = out.ledger.first().map_or(0.0, |r| r.hamiltonian);
        let scale = h0.abs().max(1.0);
        let tol = 10.0 * config.dt * config.dt;
        if config.epsilon > 0.0 {
            let law = check_energy_inequality(&out.ledger, config.epsilon, tol);
            self.at_most(&name("energy_inequality_excess"), law.max_violation, tol);
            let mono = check_nonincreasing(&out.ledger, tol);
            self.at_most(&name("hamiltonian_increase_per_record"), mono.max_violation, tol);
        } else {
            let law = check_energy_inequality(&out.ledger, 0.0, 0.0);
            self.at_most(&name("hamiltonian_relative_drift"), law.max_violation / scale, HAMILTONIAN_REL_TOL);
        }
        self.at_least(&name("completed"), f64::from(u8::from(out.completed())), 1.0);
        self.metric(&name("steps_taken"), out.steps_taken as f64);
        self.metric(&name("final_time"), out.final_state.t);
        self.metric(&name("max_pre_restoration_drift"), out.max_pre_restoration_drift);
        let h1: Vec<f64> = out.ledger.iter().map(|r| r.h1_seminorm).collect();
        if let Some(&first) = h1.first() {
            self.metric(&name("h1_seminorm_initial"), first);
            self.metric(&name("h1_seminorm_max"), h1.iter().copied().fold(f64::NAN, f64::max));
        }
        if let Some(abort) = &out.abort {
            let msg = format!("{prefix} run aborted at t = {}: {}", abort.time, abort.error);
            self.failure.get_or_insert(AppError::Numerical(msg.trim_start().to_owned()));
        }
    }
}

/// The ResidualReport file format.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualJson {
    pub l2: f64,
    pub linf: f64,
    /// Nodes of the spatial grid the residual was evaluated on.
    pub n: usize,
    pub order: Option<f64>,
}

impl From<&ResidualReport> for ResidualJson {
    fn from(r: &ResidualReport) -> Self {
        // sheets stack snapshots along x; their spatial grid is y
        let n = if r.ny > 1 { r.ny } else { r.nx };
        Self { l2: r.l2, linf: r.linf, n, order: r.order }
    }
}

/// Adds observed orders `log(e_coarse / e_fine) / log(n_fine / n_coarse)`
/// to consecutive reports of increasing resolution.
pub fn chain_orders(reports: Vec<ResidualReport>) -> Vec<ResidualReport> {
    let mut out: Vec<ResidualReport> = Vec::with_capacity(reports.len());
    for mut r in reports {
        if let Some(prev) = out.last() {
            let ratio = ResidualJson::from(&r).n as f64 / ResidualJson::from(prev).n as f64;
            r.order = Some((prev.l2 / r.l2).ln() / ratio.ln());
        }
        out.push(r);
    }
    out
}

pub fn dispatch(config: &RunConfig, dir: &Path) -> Result<Report> {
    match config.command {
        Command::Evolve => evolve::run(config, dir),
        Command::SolitonProfile => profile::run(config, dir),
        Command::VerifyReduction => reduction::run(config, dir),
        Command::Ishimori => ishimori::run(config, dir),
        Command::SweepEps => sweep::run(config, dir),
        Command::Refine => refine::run(config, dir),
        Command::CheckGeometry => geometry::run(config, dir),
    }
}

/// Largest `| |u_i| - 1 |` over the values.
pub fn unit_drift<'a>(values: impl IntoIterator<Item = &'a solitonsim_core::Vec3>) -> f64 {
    values.into_iter().map(|p| (p.norm() - 1.0).abs()).fold(0.0, f64::max)
}
