//! Periodic Poisson problem for the five-point Laplacian, solved by discrete
//! Fourier diagonalization.
//!
//! The transform is a separable direct DFT with a precomputed twiddle table,
//! `O(nx ny (nx + ny))`, which is fast enough for the grids used here and
//! needs nothing beyond `alloc`.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use super::{PeriodicGrid2D, Scalar2D};
use crate::{Error, Result};

pub const DEFAULT_COMPATIBILITY_TOL: f64 = 1e-8;

struct Dft {
    twiddle: Vec<Complex64>,
}

impl Dft {
    fn new(n: usize) -> Self {
        let twiddle = (0..n).map(|k| Complex64::from_polar(1.0, -TAU * k as f64 / n as f64)).collect();
        Self { twiddle }
    }

    /// Forward (`inverse == false`) or unnormalized inverse transform.
    fn apply(&self, input: &[Complex64], out: &mut [Complex64], inverse: bool) {
        let n = self.twiddle.len();
        for (k, o) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, x) in input.iter().enumerate() {
                let w = self.twiddle[(j * k) % n];
                acc += x * if inverse { w.conj() } else { w };
            }
            *o = acc;
        }
    }
}

fn transform_2d(grid: &PeriodicGrid2D, data: &mut [Complex64], inverse: bool) {
    let (nx, ny) = (grid.x.n(), grid.y.n());
    let (dx, dy) = (Dft::new(nx), Dft::new(ny));
    let mut line = alloc::vec![Complex64::new(0.0, 0.0); nx.max(ny)];
    let mut buf = alloc::vec![Complex64::new(0.0, 0.0); nx.max(ny)];
    for row in data.chunks_mut(ny) {
        dy.apply(row, &mut buf[..ny], inverse);
        row.copy_from_slice(&buf[..ny]);
    }
    for iy in 0..ny {
        for ix in 0..nx {
            line[ix] = data[ix * ny + iy];
        }
        dx.apply(&line[..nx], &mut buf[..nx], inverse);
        for ix in 0..nx {
            data[ix * ny + iy] = buf[ix];
        }
    }
}

/// Symbol of the three-point second difference: `-(2 - 2 cos(2πk/n)) / h^2`.
fn symbol(k: usize, n: usize, h: f64) -> f64 {
    -(2.0 - 2.0 * (TAU * k as f64 / n as f64).cos()) / (h * h)
}

/// Mean-zero `φ` with `Δ_h φ = rhs - mean(rhs)`.
///
/// Fails with [`Error::Compatibility`] when `|∫ rhs| > tol ||rhs||_{L²}`.
pub fn poisson_solve_periodic(rhs: &Scalar2D, compatibility_tol: f64) -> Result<Scalar2D> {
    let integral = rhs.integral();
    let norm = rhs.l2_norm();
    if integral.abs() > compatibility_tol * norm {
        return Err(Error::Compatibility { mean: rhs.mean(), tolerance: compatibility_tol });
    }
    Ok(solve_mean_removed(rhs))
}

/// Solve with the mean of `rhs` removed, whatever its size.
pub(crate) fn solve_mean_removed(rhs: &Scalar2D) -> Scalar2D {
    let g = rhs.grid;
    let (nx, ny) = (g.x.n(), g.y.n());
    let mut data: Vec<Complex64> = rhs.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform_2d(&g, &mut data, false);
    for kx in 0..nx {
        let sx = symbol(kx, nx, g.x.spacing());
        for ky in 0..ny {
            let idx = kx * ny + ky;
            let s = sx + symbol(ky, ny, g.y.spacing());
            data[idx] = if kx == 0 && ky == 0 { Complex64::new(0.0, 0.0) } else { data[idx] / s };
        }
    }
    transform_2d(&g, &mut data, true);
    let scale = 1.0 / (nx * ny) as f64;
    Scalar2D { grid: g, values: data.iter().map(|c| c.re * scale).collect() }
}
