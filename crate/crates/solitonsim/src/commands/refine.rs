use std::path::Path;

use solitonsim_core::evolver::evolve;
use solitonsim_core::geometry::Sphere;
use solitonsim_core::grid::{l2_norm, linf_norm, Field};
use solitonsim_core::verify::refinement_order;

use super::{Report, ORDER_BAND};
use crate::config::{InitialData, RunConfig};
use crate::csvio::write_rows;
use crate::error::Result;
use crate::initial::load_initial;
use crate::json::fmt_f64;

/// Data known to be stationary: the poles, and latitudes with `k² cos θ = 1`.
fn is_static(data: &InitialData) -> bool {
    match data {
        InitialData::Pole => true,
        InitialData::Latitude { k, costheta } => {
            costheta.abs() == 1.0 || (*k > 0 && (f64::from(k * k) * costheta - 1.0).abs() < 1e-12)
        }
        _ => false,
    }
}

/// Samples a fine field at the nodes of the grid with half as many.
fn restrict(fine: &Field<3>) -> Vec<solitonsim_core::Vec3> {
    fine.values().iter().step_by(2).copied().collect()
}

fn cell(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub fn run(config: &RunConfig, dir: &Path) -> Result<Report> {
    let data = config.initial()?;
    let mut report = Report::default();
    let mut finals = Vec::new();
    let mut statics = Vec::new();
    let mut steps = Vec::new();
    for &n in &config.levels {
        let (g, solver) = config.level(n)?;
        let initial = load_initial(data, g)?;
        let out = evolve(&Sphere, &initial, &solver)?;
        report.evolution(&format!("n{n}"), &out, &solver);
        if report.failure.is_some() {
            return Ok(report);
        }
        let dev = out.final_state.u.zip_map(&initial.u, |a, b| *a - *b)?;
        statics.push(linf_norm(&dev));
        steps.push((g.spacing(), solver.dt));
        finals.push(out.final_state.u);
    }

    // differences between consecutive levels, on the coarser grid
    let mut successive = vec![None; finals.len()];
    for j in 1..finals.len() {
        let coarse = &finals[j - 1];
        let fine = Field::new(*coarse.grid(), restrict(&finals[j]))?;
        let d = coarse.zip_map(&fine, |a, b| *a - *b)?;
        successive[j] = Some((linf_norm(&d), l2_norm(&d)));
    }
    let order = |a: Option<f64>, b: Option<f64>| Some(refinement_order(a?, b?));
    let mut rows = Vec::new();
    let (mut last_succ, mut last_static) = (None, None);
    for (j, &n) in config.levels.iter().enumerate() {
        let succ_linf = successive[j].map(|s| s.0);
        let succ_order = if j >= 2 { order(successive[j - 1].map(|s| s.0), succ_linf) } else { None };
        let static_order = if j >= 1 { order(Some(statics[j - 1]), Some(statics[j])) } else { None };
        last_succ = succ_order.or(last_succ);
        last_static = static_order.or(last_static);
        rows.push(vec![
            n.to_string(),
            fmt_f64(steps[j].0),
            fmt_f64(steps[j].1),
            cell(succ_linf),
            cell(successive[j].map(|s| s.1)),
            cell(succ_order),
            fmt_f64(statics[j]),
            cell(static_order),
        ]);
    }
    write_rows(
        &dir.join("refine.csv"),
        &["n", "h", "dt", "successive_linf", "successive_l2", "successive_order", "static_linf", "static_order"],
        rows,
    )?;
    if let Some(o) = last_succ {
        report.in_band("successive_order", o, ORDER_BAND);
    }
    let worst_static = statics.iter().copied().fold(0.0, f64::max);
    if is_static(data) && worst_static < 1e-13 {
        // exact equilibria of the discrete flow have no order to measure
        report.at_most("static_linf", worst_static, 1e-13);
    } else if let Some(o) = last_static {
        if is_static(data) {
            report.in_band("static_order", o, ORDER_BAND);
        } else {
            report.metric("static_order", o);
        }
    }
    Ok(report)
}
