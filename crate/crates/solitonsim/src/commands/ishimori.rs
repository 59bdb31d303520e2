use std::path::Path;

use serde::Serialize;
use solitonsim_core::evolver::{evolve, MapState};
use solitonsim_core::geometry::Sphere;
use solitonsim_core::grid::Field2D;
use solitonsim_core::verify::{ishimori_phi, ishimori_residual, sheet_from_snapshots, PhiReport, XBoundary};

use super::{chain_orders, unit_drift, Report, ResidualJson, ORDER_BAND};
use crate::config::{Grid, InitialData, RunConfig};
use crate::csvio::{read_map_2d, write_field_2d, write_scalar_2d};
use crate::error::{AppError, Result};
use crate::initial::load_initial;
use crate::json;

/// The Poisson solve for φ is accurate to rounding.
const PHI_TOL: f64 = 1e-10;

#[derive(Serialize)]
struct PhiJson {
    compatibility: f64,
    degree: f64,
    mean: f64,
    relative_residual: f64,
    degree_warning: bool,
    rhs_max_abs: f64,
}

#[derive(Serialize)]
struct IshimoriJson {
    x_boundary: &'static str,
    residual: ResidualJson,
    levels: Vec<ResidualJson>,
    phi: PhiJson,
    y_independent: bool,
}

/// Drops a final snapshot that is off the `snapshot_every` cadence.
fn evenly_spaced(mut snapshots: Vec<MapState<3>>) -> Vec<MapState<3>> {
    if snapshots.len() >= 3 {
        let first = snapshots[1].t - snapshots[0].t;
        let n = snapshots.len();
        let last = snapshots[n - 1].t - snapshots[n - 2].t;
        if (last - first).abs() > 1e-9 * first {
            snapshots.pop();
        }
    }
    snapshots
}

fn y_independent(s: &Field2D<3>) -> bool {
    let ny = s.grid().y.n();
    s.values().chunks(ny).all(|row| row.iter().all(|p| p == &row[0]))
}

pub fn run(config: &RunConfig, dir: &Path) -> Result<Report> {
    let mut report = Report::default();
    let (sheets, xb) = match config.grid()? {
        Grid::Torus(g) => {
            let InitialData::File { path } = config.initial()? else { unreachable!("checked by validation") };
            (vec![read_map_2d(path, &g)?], XBoundary::Periodic)
        }
        Grid::Circle(g) => {
            let data = config.initial()?;
            let mut ns: Vec<usize> = config.levels.iter().copied().filter(|&n| n != g.n()).collect();
            ns.push(g.n());
            ns.sort_unstable();
            let mut sheets = Vec::new();
            for n in ns {
                let (lg, solver) = config.level(n)?;
                let out = evolve(&Sphere, &load_initial(data, lg)?, &solver)?;
                report.evolution(&format!("n{n}"), &out, &solver);
                if report.failure.is_some() {
                    return Ok(report);
                }
                sheets.push(sheet_from_snapshots(&evenly_spaced(out.snapshots))?);
            }
            (sheets, XBoundary::Open)
        }
    };
    for s in &sheets {
        report.drifts(unit_drift(s.values()), 0.0);
    }
    let reports = sheets.iter().map(|s| ishimori_residual(s, xb)).collect::<Result<Vec<_>, _>>()?;
    let levels: Vec<ResidualJson> = chain_orders(reports).iter().map(ResidualJson::from).collect();
    let finest = sheets.last().expect("at least one sheet");
    let phi: PhiReport = ishimori_phi(finest, xb).map_err(|e| AppError::Numerical(format!("phi recovery: {e}")))?;
    write_field_2d(&dir.join("sheet.csv"), finest)?;
    write_scalar_2d(&dir.join("phi.csv"), &phi.phi)?;

    let residual = *levels.last().expect("nonempty");
    report.metric("residual_l2", residual.l2);
    report.metric("residual_linf", residual.linf);
    if let Some(order) = residual.order {
        report.in_band("residual_order", order, ORDER_BAND);
    }
    let rhs_max_abs = phi.rhs.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let flat = y_independent(finest);
    if flat {
        report.at_most("rhs_identically_zero", rhs_max_abs, 0.0);
    }
    report.metric("degree", phi.degree);
    if phi.degree_warning {
        log::warn!("the sheet is not compatible (degree {:.6}); phi solves the mean-removed problem", phi.degree);
    }
    report.at_most("phi_relative_residual", phi.relative_residual, PHI_TOL);
    let out = IshimoriJson {
        x_boundary: match xb {
            XBoundary::Periodic => "periodic",
            XBoundary::Open => "open",
        },
        residual,
        levels,
        phi: PhiJson {
            compatibility: phi.compatibility,
            degree: phi.degree,
            mean: phi.mean,
            relative_residual: phi.relative_residual,
            degree_warning: phi.degree_warning,
            rhs_max_abs,
        },
        y_independent: flat,
    };
    json::write(&dir.join("ishimori.json"), &out)?;
    Ok(report)
}
