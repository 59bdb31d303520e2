//! CSV formats: grid fields (`x[,y],c0,...`), the energy ledger, the
//! elliptic history and small result tables.

use std::path::Path;

use solitonsim_core::elliptic::HistoryRow;
use solitonsim_core::evolver::EnergyRecord;
use solitonsim_core::geometry::sphere;
use solitonsim_core::grid::{Field, Field2D, PeriodicGrid1D, PeriodicGrid2D, Scalar2D};
use solitonsim_core::{AmbientVector, Vec3};

use crate::error::{AppError, Result};
use crate::json::fmt_f64;

/// Nodes whose norm is further than this from 1 mark a file as not being a
/// sphere-valued map at all, rather than one with rounding noise.
pub const FILE_UNIT_TOL: f64 = 1e-3;

pub const LEDGER_HEADER: [&str; 8] = [
    "t",
    "kinetic",
    "dirichlet",
    "potential_integral",
    "hamiltonian",
    "constraint_drift",
    "tangency_drift",
    "h1_seminorm",
];

fn csv_error(path: &Path, e: csv::Error) -> AppError {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => AppError::io(path, io),
            _ => unreachable!("checked is_io_error"),
        }
    } else {
        AppError::invalid(format!("{}: {e}", path.display()))
    }
}

/// Writes a table whose cells are already formatted.
pub fn write_rows<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(header).map_err(|e| csv_error(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| AppError::io(path, e))
}

fn component_header(lead: &[&str], k: usize) -> Vec<String> {
    lead.iter().map(|s| s.to_string()).chain((0..k).map(|c| format!("c{c}"))).collect()
}

fn write_named(path: &Path, header: Vec<String>, rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    write_rows(path, &header, rows)
}

pub fn write_field<const K: usize>(path: &Path, f: &Field<K>) -> Result<()> {
    let g = *f.grid();
    let rows = f
        .values()
        .iter()
        .enumerate()
        .map(move |(i, v)| std::iter::once(fmt_f64(g.node(i))).chain(v.0.iter().map(|c| fmt_f64(*c))).collect());
    write_named(path, component_header(&["x"], K), rows)
}

/// A snapshot as `x,c0..c5`: the map in `c0..c2`, its velocity in `c3..c5`.
/// The file is a valid `file` initial datum.
pub fn write_state(path: &Path, u: &Field<3>, v: &Field<3>) -> Result<()> {
    let g = *u.grid();
    let rows = u.values().iter().zip(v.values()).enumerate().map(move |(i, (p, q))| {
        std::iter::once(fmt_f64(g.node(i))).chain(p.0.iter().chain(&q.0).map(|c| fmt_f64(*c))).collect()
    });
    write_named(path, component_header(&["x"], 6), rows)
}

pub fn write_field_2d<const K: usize>(path: &Path, f: &Field2D<K>) -> Result<()> {
    let g = *f.grid();
    let ny = g.y.n();
    let rows = f.values().iter().enumerate().map(move |(i, v)| {
        let (ix, iy) = (i / ny, i % ny);
        [fmt_f64(g.x.node(ix)), fmt_f64(g.y.node(iy))].into_iter().chain(v.0.iter().map(|c| fmt_f64(*c))).collect()
    });
    write_named(path, component_header(&["x", "y"], K), rows)
}

pub fn write_scalar_2d(path: &Path, f: &Scalar2D) -> Result<()> {
    let values = f.values.iter().map(|v| AmbientVector::new([*v])).collect();
    write_field_2d(path, &Field2D::<1>::new(f.grid, values)?)
}

pub fn write_ledger(path: &Path, ledger: &[EnergyRecord]) -> Result<()> {
    let rows = ledger.iter().map(|r| {
        [
            r.t,
            r.kinetic,
            r.dirichlet,
            r.potential_integral,
            r.hamiltonian,
            r.constraint_drift,
            r.tangency_drift,
            r.h1_seminorm,
        ]
        .iter()
        .map(|x| fmt_f64(*x))
        .collect()
    });
    write_rows(path, &LEDGER_HEADER, rows)
}

pub fn write_history(path: &Path, history: &[HistoryRow]) -> Result<()> {
    let rows = history.iter().map(|r| vec![r.iter.to_string(), fmt_f64(r.f), fmt_f64(r.residual_linf)]);
    write_rows(path, &["iter", "F", "residual_linf"], rows)
}

/// A grid CSV as read from disk, before it is matched against a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridTable {
    /// 1 for `x,c0,...`, 2 for `x,y,c0,...`.
    pub dims: usize,
    pub components: usize,
    pub coords: Vec<[f64; 2]>,
    pub values: Vec<Vec<f64>>,
}

pub fn read_grid(path: &Path) -> Result<GridTable> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let header: Vec<String> = r.headers().map_err(|e| csv_error(path, e))?.iter().map(str::to_owned).collect();
    let bad_header = || AppError::invalid(format!("{}: header must be x[,y],c0,c1,...", path.display()));
    let dims = match header.get(..2) {
        Some([x, y]) if x == "x" && y == "y" => 2,
        Some([x, _]) if x == "x" => 1,
        _ => return Err(bad_header()),
    };
    let components = header.len() - dims;
    if components == 0 || header[dims..].iter().enumerate().any(|(c, h)| *h != format!("c{c}")) {
        return Err(bad_header());
    }
    let (mut coords, mut values) = (Vec::new(), Vec::new());
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let nums = rec
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| AppError::invalid(format!("{}: row {}: {e}", path.display(), line + 1)))?;
        coords.push(if dims == 2 { [nums[0], nums[1]] } else { [nums[0], 0.0] });
        values.push(nums[dims..].to_vec());
    }
    Ok(GridTable { dims, components, coords, values })
}

fn unit_node(path: &Path, row: usize, c: &[f64]) -> Result<Vec3> {
    let p = Vec3::new([c[0], c[1], c[2]]);
    let defect = (p.norm() - 1.0).abs();
    if !(defect <= FILE_UNIT_TOL) {
        return Err(AppError::invalid(format!(
            "{}: row {}: |u| deviates from 1 by {defect:e}; not a map into the sphere",
            path.display(),
            row + 1
        )));
    }
    Ok(sphere::project_point(p)?)
}

fn check_axis(path: &Path, what: &str, got: f64, want: f64, h: f64) -> Result<()> {
    if (got - want).abs() > 1e-6 * h {
        return Err(AppError::invalid(format!("{}: {what} = {got} where the grid has {want}", path.display())));
    }
    Ok(())
}

/// Reads a map on `grid` (columns `c0..c2`), optionally followed by a
/// velocity (`c3..c5`). Nodes are renormalized; a node off the sphere by more
/// than [`FILE_UNIT_TOL`] rejects the file.
pub fn read_map_1d(path: &Path, grid: &PeriodicGrid1D) -> Result<(Field<3>, Option<Field<3>>)> {
    let t = read_grid(path)?;
    if t.dims != 1 || !(t.components == 3 || t.components == 6) {
        return Err(AppError::invalid(format!(
            "{}: expected columns x,c0,c1,c2 (optionally c3..c5 for the velocity)",
            path.display()
        )));
    }
    if t.values.len() != grid.n() {
        return Err(AppError::invalid(format!(
            "{}: expected {} nodes, found {}",
            path.display(),
            grid.n(),
            t.values.len()
        )));
    }
    let mut u = Vec::with_capacity(grid.n());
    let mut v = Vec::with_capacity(grid.n());
    for (i, (x, c)) in t.coords.iter().zip(&t.values).enumerate() {
        check_axis(path, "x", x[0], grid.node(i), grid.spacing())?;
        u.push(unit_node(path, i, c)?);
        if t.components == 6 {
            v.push(Vec3::new([c[3], c[4], c[5]]));
        }
    }
    let u = Field::new(*grid, u)?;
    let v = if t.components == 6 { Some(Field::new(*grid, v)?) } else { None };
    Ok((u, v))
}

/// Reads a sphere-valued sheet on `grid`, rows ordered with `y` fastest.
pub fn read_map_2d(path: &Path, grid: &PeriodicGrid2D) -> Result<Field2D<3>> {
    let t = read_grid(path)?;
    if t.dims != 2 || t.components != 3 {
        return Err(AppError::invalid(format!("{}: expected columns x,y,c0,c1,c2", path.display())));
    }
    if t.values.len() != grid.len() {
        return Err(AppError::invalid(format!(
            "{}: expected {} nodes, found {}",
            path.display(),
            grid.len(),
            t.values.len()
        )));
    }
    let ny = grid.y.n();
    let mut u = Vec::with_capacity(grid.len());
    for (i, (xy, c)) in t.coords.iter().zip(&t.values).enumerate() {
        check_axis(path, "x", xy[0], grid.x.node(i / ny), grid.x.spacing())?;
        check_axis(path, "y", xy[1], grid.y.node(i % ny), grid.y.spacing())?;
        u.push(unit_node(path, i, c)?);
    }
    Ok(Field2D::new(*grid, u)?)
}
