use std::path::Path;

use serde::Serialize;
use solitonsim_core::geometry::{hermitian_hessian_residual, killing_symmetry_residual, sphere};
use solitonsim_core::init::sphere_samples;
use solitonsim_core::verify::holomorphic_isometry_check;
use solitonsim_core::Vec3;

use super::{unit_drift, Report};
use crate::config::RunConfig;
use crate::error::Result;
use crate::json;

/// Second-order finite differences at `fd_step = 1e-4` resolve an exact
/// identity to about this level.
pub const FD_TOL: f64 = 1e-6;
/// A function that is not Kähler-Hessian must be visibly so.
pub const CONTROL_MIN: f64 = 1e-2;
const ISOMETRY_TOL: f64 = 1e-12;

#[derive(Serialize)]
struct Sample {
    u: [f64; 3],
    hessian_u3: f64,
    hessian_u1u3: f64,
    killing: f64,
}

pub fn run(config: &RunConfig, dir: &Path) -> Result<Report> {
    let geo = &config.geometry;
    let samples = sphere_samples(geo.samples, geo.seed);
    let killing = |p: Vec3| sphere::E3.cross(&p);
    let mut rows = Vec::with_capacity(samples.len());
    for (u, _) in &samples {
        rows.push(Sample {
            u: u.0,
            hessian_u3: hermitian_hessian_residual(|p| p.0[2], *u, geo.fd_step)?,
            hessian_u1u3: hermitian_hessian_residual(|p| p.0[0] * p.0[2], *u, geo.fd_step)?,
            killing: killing_symmetry_residual(killing, *u, geo.fd_step)?,
        });
    }
    let mut isometry = 0.0f64;
    for alpha in [0.3, 1.0, std::f64::consts::PI, -2.5] {
        isometry = isometry.max(holomorphic_isometry_check(alpha, &samples)?);
    }
    json::write(&dir.join("geometry.json"), &rows)?;

    let mut report = Report::default();
    report.drifts(unit_drift(samples.iter().map(|(u, _)| u)), 0.0);
    let max = |f: fn(&Sample) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    report.at_most("hessian_u3", max(|s| s.hessian_u3), FD_TOL);
    report.at_least("hessian_u1u3_control", max(|s| s.hessian_u1u3), CONTROL_MIN);
    report.at_most("killing_symmetry", max(|s| s.killing), FD_TOL);
    report.at_most("isometry_defect", isometry, ISOMETRY_TOL);
    Ok(report)
}
