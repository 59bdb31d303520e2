use std::path::Path;

use solitonsim_core::evolver::evolve;
use solitonsim_core::geometry::Sphere;

use super::Report;
use crate::config::RunConfig;
use crate::csvio::{write_ledger, write_state};
use crate::error::Result;
use crate::initial::load_initial;

pub fn snapshot_name(index: usize) -> String {
    format!("snap_{index:06}.csv")
}

pub fn run(config: &RunConfig, dir: &Path) -> Result<Report> {
    let g = config.circle()?;
    let initial = load_initial(config.initial()?, g)?;
    let solver = config.solver.to_config(g.spacing());
    let out = evolve(&Sphere, &initial, &solver)?;
    write_ledger(&dir.join("ledger.csv"), &out.ledger)?;
    for (i, s) in out.snapshots.iter().enumerate() {
        write_state(&dir.join(snapshot_name(i)), &s.u, &s.v)?;
    }
    let mut report = Report::default();
    report.evolution("", &out, &solver);
    Ok(report)
}
