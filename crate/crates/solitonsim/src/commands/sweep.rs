use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use solitonsim_core::evolver::{evolve, member_config, sweep_from_runs};
use solitonsim_core::geometry::Sphere;

use super::Report;
use crate::config::RunConfig;
use crate::csvio::{write_ledger, write_rows};
use crate::error::{AppError, Result};
use crate::initial::load_initial;
use crate::json::{self, fmt_f64};

/// Consecutive deviation ratios expected of a first-order dependence on ε.
pub const RATIO_BAND: (f64, f64) = (1.5, 2.5);

/// Worker threads for concurrent runs: `SOLITONSIM_THREADS` when set, else
/// the number of CPUs.
pub fn thread_cap() -> Result<usize> {
    match std::env::var("SOLITONSIM_THREADS") {
        Err(_) => Ok(0),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(AppError::invalid(format!("SOLITONSIM_THREADS must be a positive integer, got {s:?}"))),
        },
    }
}

#[derive(Serialize)]
struct Member {
    epsilon: f64,
    dt: f64,
    completed: bool,
    steps_taken: usize,
}

pub fn run(config: &RunConfig, dir: &Path) -> Result<Report> {
    let g = config.circle()?;
    let initial = load_initial(config.initial()?, g)?;
    let base = config.solver.to_config(g.spacing());
    let eps = config.eps.clone().expect("checked by validation");
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_cap()?)
        .build()
        .map_err(|e| AppError::invalid(format!("thread pool: {e}")))?;
    // every member owns its directory, so the jobs share nothing
    let runs = pool.install(|| {
        eps.par_iter()
            .enumerate()
            .map(|(i, &e)| {
                let member = member_config(&base, e);
                let out = evolve(&Sphere, &initial, &member)?;
                let sub = dir.join(format!("eps_{i:02}"));
                fs::create_dir_all(&sub).map_err(|err| AppError::io(&sub, err))?;
                write_ledger(&sub.join("ledger.csv"), &out.ledger)?;
                let info =
                    Member { epsilon: e, dt: member.dt, completed: out.completed(), steps_taken: out.steps_taken };
                json::write(&sub.join("member.json"), &info)?;
                Ok((member, out))
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut report = Report::default();
    for (i, (member, out)) in runs.iter().enumerate() {
        report.evolution(&format!("eps_{i:02}"), out, member);
    }
    let outs: Vec<_> = runs.into_iter().map(|(_, o)| o).collect();
    let table = sweep_from_runs(&eps, &outs)?;
    let rows = table
        .rows
        .iter()
        .map(|r| vec![fmt_f64(r.epsilon), fmt_f64(r.sup_l2), fmt_f64(r.sup_linf), r.aborted.to_string()]);
    write_rows(&dir.join("sweep.csv"), &["epsilon", "sup_l2", "sup_linf", "aborted"], rows)?;
    report.at_least("deviation_monotone", f64::from(u8::from(table.is_monotone(0.0))), 1.0);
    for (i, r) in table.ratios().into_iter().enumerate() {
        report.in_band(&format!("deviation_ratio_{i}"), r, RATIO_BAND);
    }
    Ok(report)
}
