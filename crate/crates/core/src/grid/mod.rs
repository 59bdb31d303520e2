//! Uniform periodic grids, fields on them, second-order stencils, quadrature,
//! discrete Sobolev norms of sections and a periodic Poisson solver.

mod field;
mod ops;
pub(crate) mod poisson;
mod sobolev;

pub use field::{Field, Field2D, Scalar2D};
pub(crate) use ops::laplacian_into;
pub use ops::{
    diff1, diff_x, diff_y, dirichlet_energy, forward_diff, integrate, l2_norm, laplacian, laplacian_2d, linf_norm,
};
pub use poisson::{poisson_solve_periodic, DEFAULT_COMPATIBILITY_TOL};
pub use sobolev::sobolev_seminorm;

use core::f64::consts::TAU;

use crate::{Error, Result};

pub const MIN_NODES: usize = 8;

/// `n` equispaced nodes `x_i = i h` on a circle of circumference `length`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicGrid1D {
    n: usize,
    length: f64,
}

impl PeriodicGrid1D {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < MIN_NODES {
            return Err(Error::Config("a periodic grid needs at least 8 nodes"));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::Config("grid length must be positive and finite"));
        }
        Ok(Self { n, length })
    }

    /// Grid on the unit-speed circle `[0, 2π)`.
    pub fn circle(n: usize) -> Result<Self> {
        Self::new(n, TAU)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.node(i))
    }
}

/// Tensor product of two periodic grids; `x` is the slow (row) index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicGrid2D {
    pub x: PeriodicGrid1D,
    pub y: PeriodicGrid1D,
}

impl PeriodicGrid2D {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        Ok(Self { x: PeriodicGrid1D::new(nx, lx)?, y: PeriodicGrid1D::new(ny, ly)? })
    }

    pub fn len(&self) -> usize {
        self.x.n() * self.y.n()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        ix * self.y.n() + iy
    }

    pub fn cell_area(&self) -> f64 {
        self.x.spacing() * self.y.spacing()
    }

    pub fn area(&self) -> f64 {
        self.x.length() * self.y.length()
    }
}
