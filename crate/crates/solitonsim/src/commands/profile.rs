use std::path::Path;

use solitonsim_core::elliptic::solve_elliptic;
use solitonsim_core::verify::schrodinger_residual;

use super::{unit_drift, Report, ResidualJson};
use crate::config::RunConfig;
use crate::csvio::{write_field, write_history};
use crate::error::{AppError, Result};
use crate::initial::load_initial;
use crate::json;

pub fn run(config: &RunConfig, dir: &Path) -> Result<Report> {
    let g = config.circle()?;
    let start = load_initial(config.initial()?, g)?.u;
    let elliptic = config.elliptic.to_config(g.spacing());
    let sol = solve_elliptic(&start, &elliptic)?;
    write_field(&dir.join("profile.csv"), &sol.u)?;
    write_history(&dir.join("history.csv"), &sol.history)?;
    let residual = schrodinger_residual(&sol.u)?;
    json::write(&dir.join("residual.json"), &ResidualJson::from(&residual))?;

    let mut report = Report::default();
    report.drifts(unit_drift(sol.u.values()), 0.0);
    let last = sol.history.last().expect("the history holds the starting row");
    report.at_most("elliptic_residual_linf", last.residual_linf, elliptic.residual_target);
    report.metric("iterations", last.iter as f64);
    report.metric("functional_f", last.f);
    report.metric("schrodinger_residual_l2", residual.l2);
    let u3: Vec<f64> = sol.u.values().iter().map(|p| p.0[2]).collect();
    let mean = u3.iter().sum::<f64>() / u3.len() as f64;
    report.metric("u3_mean", mean);
    report.metric("u3_spread", u3.iter().map(|z| (z - mean).abs()).fold(0.0, f64::max));
    if !sol.converged {
        report.failure = Some(AppError::Numerical(format!(
            "no convergence in {} iterations (residual {} > {})",
            last.iter, last.residual_linf, elliptic.residual_target
        )));
    }
    Ok(report)
}
