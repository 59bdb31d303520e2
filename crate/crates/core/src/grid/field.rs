use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use super::{PeriodicGrid1D, PeriodicGrid2D};
use crate::{AmbientVector, Error, Result};

/// One ambient vector per node of a 1D periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<const K: usize> {
    grid: PeriodicGrid1D,
    values: Vec<AmbientVector<K>>,
}

impl<const K: usize> Field<K> {
    pub fn new(grid: PeriodicGrid1D, values: Vec<AmbientVector<K>>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::Precondition {
                what: "value count does not match node count",
                node: None,
                value: values.len() as f64,
            });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: PeriodicGrid1D) -> Self {
        Self { grid, values: alloc::vec![AmbientVector::zero(); grid.n()] }
    }

    pub fn from_fn(grid: PeriodicGrid1D, f: impl Fn(f64) -> AmbientVector<K>) -> Self {
        Self { grid, values: grid.nodes().map(f).collect() }
    }

    pub fn grid(&self) -> &PeriodicGrid1D {
        &self.grid
    }

    pub fn values(&self) -> &[AmbientVector<K>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [AmbientVector<K>] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<AmbientVector<K>> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(&AmbientVector<K>) -> AmbientVector<K>) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(f).collect() }
    }

    /// Nodewise combination of two fields on the same grid.
    pub fn zip_map(
        &self,
        other: &Self,
        f: impl Fn(&AmbientVector<K>, &AmbientVector<K>) -> AmbientVector<K>,
    ) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| f(a, b)).collect();
        Ok(Self { grid: self.grid, values })
    }

    /// Field shifted by `k` nodes: `out[i] = self[i + k]`.
    pub fn roll(&self, k: usize) -> Self {
        let n = self.len();
        let values = (0..n).map(|i| self.values[(i + k) % n]).collect();
        Self { grid: self.grid, values }
    }
}

/// One ambient vector per node of a 2D periodic grid, stored row-major with
/// `y` varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Field2D<const K: usize> {
    grid: PeriodicGrid2D,
    values: Vec<AmbientVector<K>>,
}

impl<const K: usize> Field2D<K> {
    pub fn new(grid: PeriodicGrid2D, values: Vec<AmbientVector<K>>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Precondition {
                what: "value count does not match node count",
                node: None,
                value: values.len() as f64,
            });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: PeriodicGrid2D, f: impl Fn(f64, f64) -> AmbientVector<K>) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for ix in 0..grid.x.n() {
            for iy in 0..grid.y.n() {
                values.push(f(grid.x.node(ix), grid.y.node(iy)));
            }
        }
        Self { grid, values }
    }

    pub fn grid(&self) -> &PeriodicGrid2D {
        &self.grid
    }

    pub fn values(&self) -> &[AmbientVector<K>] {
        &self.values
    }

    #[inline]
    pub fn at(&self, ix: usize, iy: usize) -> &AmbientVector<K> {
        &self.values[self.grid.index(ix, iy)]
    }

    pub fn map(&self, f: impl Fn(&AmbientVector<K>) -> AmbientVector<K>) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(f).collect() }
    }
}

/// Scalar field on a 2D periodic grid, same layout as [`Field2D`].
#[derive(Debug, Clone, PartialEq)]
pub struct Scalar2D {
    pub grid: PeriodicGrid2D,
    pub values: Vec<f64>,
}

impl Scalar2D {
    pub fn new(grid: PeriodicGrid2D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Precondition {
                what: "value count does not match node count",
                node: None,
                value: values.len() as f64,
            });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: PeriodicGrid2D, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for ix in 0..grid.x.n() {
            for iy in 0..grid.y.n() {
                values.push(f(grid.x.node(ix), grid.y.node(iy)));
            }
        }
        Self { grid, values }
    }

    pub fn integral(&self) -> f64 {
        self.grid.cell_area() * self.values.iter().sum::<f64>()
    }

    pub fn mean(&self) -> f64 {
        self.integral() / self.grid.area()
    }

    pub fn l2_norm(&self) -> f64 {
        (self.grid.cell_area() * self.values.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }

    /// Five-point periodic Laplacian.
    pub fn laplacian(&self) -> Self {
        let g = self.grid;
        let (nx, ny) = (g.x.n(), g.y.n());
        let (ihx2, ihy2) = (g.x.spacing().powi(-2), g.y.spacing().powi(-2));
        let f = &self.values;
        let mut out = alloc::vec![0.0; g.len()];
        for ix in 0..nx {
            let (xm, xp) = ((ix + nx - 1) % nx, (ix + 1) % nx);
            for iy in 0..ny {
                let (ym, yp) = ((iy + ny - 1) % ny, (iy + 1) % ny);
                let c = f[g.index(ix, iy)];
                out[g.index(ix, iy)] = (f[g.index(xp, iy)] - 2.0 * c + f[g.index(xm, iy)]) * ihx2
                    + (f[g.index(ix, yp)] - 2.0 * c + f[g.index(ix, ym)]) * ihy2;
            }
        }
        Self { grid: g, values: out }
    }
}
