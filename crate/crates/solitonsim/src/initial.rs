//! Builds the initial state described by the configuration.

use solitonsim_core::evolver::MapState;
use solitonsim_core::geometry::{sphere, Sphere};
use solitonsim_core::grid::{Field, PeriodicGrid1D};
use solitonsim_core::init::{constant, latitude, perturb};

use crate::config::InitialData;
use crate::csvio::read_map_1d;
use crate::error::{AppError, Result};

/// The map and velocity for `data` on `grid`. Analytic data sit at rest;
/// a file supplies a velocity when it has six columns.
pub fn load_initial(data: &InitialData, grid: PeriodicGrid1D) -> Result<MapState<3>> {
    let (u, v) = fields(data, grid)?;
    let v = v.unwrap_or_else(|| Field::zeros(grid));
    MapState::new(&Sphere, u, v).map_err(|e| AppError::invalid(format!("initial_data: {e}")))
}

fn fields(data: &InitialData, grid: PeriodicGrid1D) -> Result<(Field<3>, Option<Field<3>>)> {
    Ok(match data {
        InitialData::Pole => (constant(grid, sphere::E3), None),
        InitialData::Latitude { k, costheta } => (latitude(grid, *k, *costheta), None),
        InitialData::File { path } => read_map_1d(path, &grid)?,
        InitialData::Perturbed { base, amplitude, seed } => {
            let (u, v) = fields(base, grid)?;
            let u = perturb(&u, *amplitude, *seed)?;
            // keep a supplied velocity tangent to the moved map
            let v = v.map(|v| u.zip_map(&v, |p, q| sphere::project_tangent(*p, *q).expect("unit map"))).transpose()?;
            (u, v)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perturbed_data_repeat_bitwise() {
        let g = PeriodicGrid1D::circle(64).unwrap();
        let d = InitialData::Perturbed { base: Box::new(InitialData::Pole), amplitude: 0.01, seed: 7 };
        let (a, b) = (load_initial(&d, g).unwrap(), load_initial(&d, g).unwrap());
        let bits = |s: &MapState<3>| s.u.values().iter().flat_map(|p| p.0).map(f64::to_bits).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
        assert!(a.u.values().iter().any(|p| p.0[0] != 0.0));
    }
}
