use std::path::Path;

use serde::Serialize;
use solitonsim_core::grid::PeriodicGrid1D;
use solitonsim_core::init::sphere_samples;
use solitonsim_core::verify::{build_soliton_frames, holomorphic_isometry_check, schrodinger_residual};

use super::{chain_orders, unit_drift, Report, ResidualJson, ORDER_BAND};
use crate::config::RunConfig;
use crate::csvio::write_field;
use crate::error::Result;
use crate::initial::load_initial;
use crate::json;

/// Rotations commute with J to rounding.
const ISOMETRY_TOL: f64 = 1e-12;

#[derive(Serialize)]
struct Frame {
    index: usize,
    t: f64,
    isometry_defect: f64,
}

pub fn run(config: &RunConfig, dir: &Path) -> Result<Report> {
    let g = config.circle()?;
    let data = config.initial()?;
    let u = load_initial(data, g)?.u;
    let mut report = Report::default();
    report.drifts(unit_drift(u.values()), 0.0);

    // the configured grid last, so its report carries the order
    let mut ns: Vec<usize> = config.levels.iter().copied().filter(|&n| n != g.n()).collect();
    ns.push(g.n());
    ns.sort_unstable();
    let mut reports = Vec::new();
    for &n in &ns {
        let u_n = if n == g.n() { u.clone() } else { load_initial(data, PeriodicGrid1D::new(n, g.length())?)?.u };
        reports.push(schrodinger_residual(&u_n)?);
    }
    let reports = chain_orders(reports);
    let levels: Vec<ResidualJson> = reports.iter().map(ResidualJson::from).collect();
    json::write(&dir.join("residual_levels.json"), &levels)?;
    let own = levels[ns.iter().position(|&n| n == g.n()).expect("pushed above")];
    json::write(&dir.join("residual.json"), &own)?;
    report.metric("residual_l2", own.l2);
    report.metric("residual_linf", own.linf);
    if let Some(order) = own.order {
        report.in_band("residual_order", order, ORDER_BAND);
    }

    let samples = sphere_samples(config.geometry.samples, config.geometry.seed);
    let frames = build_soliton_frames(&u, &config.frame_times)?;
    let mut rows = Vec::new();
    for (index, (frame, &t)) in frames.iter().zip(&config.frame_times).enumerate() {
        write_field(&dir.join(format!("frame_{index:06}.csv")), frame)?;
        rows.push(Frame { index, t, isometry_defect: holomorphic_isometry_check(t, &samples)? });
    }
    json::write(&dir.join("frames.json"), &rows)?;
    let worst = rows.iter().map(|r| r.isometry_defect).fold(0.0, f64::max);
    report.at_most("isometry_defect", worst, ISOMETRY_TOL);
    Ok(report)
}
