//! Closed-form initial data and seeded perturbations.

use alloc::vec::Vec;
use core::f64::consts::TAU;

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::sphere::{project_point, tangent_part};
use crate::grid::{Field, PeriodicGrid1D};
use crate::{Result, Vec3};

/// Number of Fourier modes in a seeded perturbation.
pub const PERTURBATION_MODES: usize = 4;

/// Latitude circle `(sinθ cos kx, sinθ sin kx, cosθ)` traversed `k` times.
pub fn latitude(grid: PeriodicGrid1D, k: u32, cos_theta: f64) -> Field<3> {
    let sin_theta = (1.0 - cos_theta * cos_theta).max(0.0).sqrt();
    let w = k as f64 * TAU / grid.length();
    Field::from_fn(grid, |x| {
        let (s, c) = (w * x).sin_cos();
        Vec3::new([sin_theta * c, sin_theta * s, cos_theta])
    })
}

pub fn constant(grid: PeriodicGrid1D, p: Vec3) -> Field<3> {
    Field::from_fn(grid, |_| p)
}

/// Smooth random ambient field `Σ_{m=1..4} a_m cos(m x) + b_m sin(m x)`
/// (wavenumbers relative to the grid length) with coefficients drawn from a
/// ChaCha8 stream seeded by `seed`. The same seed gives the same continuum
/// function on every grid, so perturbed data refines consistently.
pub fn seeded_smooth_field(grid: PeriodicGrid1D, seed: u64) -> Field<3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs: Vec<(Vec3, Vec3)> = Vec::with_capacity(PERTURBATION_MODES);
    for _ in 0..PERTURBATION_MODES {
        let mut draw = || Vec3::new([0; 3].map(|_| rng.random_range(-1.0..1.0)));
        let a = draw();
        let b = draw();
        coeffs.push((a, b));
    }
    let w = TAU / grid.length();
    Field::from_fn(grid, |x| {
        coeffs.iter().enumerate().fold(Vec3::zero(), |acc, (m, (a, b))| {
            let (s, c) = ((m + 1) as f64 * w * x).sin_cos();
            acc + *a * c + *b * s
        })
    })
}

/// `u + amplitude · P(u) η`, renormalized, where `η` is the seeded smooth
/// field scaled to unit sup norm.
pub fn perturb(u: &Field<3>, amplitude: f64, seed: u64) -> Result<Field<3>> {
    let eta = seeded_smooth_field(*u.grid(), seed);
    let scale = eta.values().iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let scale = if scale > 0.0 { amplitude / scale } else { 0.0 };
    let values = u
        .values()
        .iter()
        .zip(eta.values())
        .map(|(p, e)| project_point(*p + tangent_part(p, e) * scale))
        .collect::<Result<Vec<_>>>()?;
    Field::new(*u.grid(), values)
}

/// Seeded sample pairs `(u, X)`: `u` uniform on the sphere (uniform height
/// and longitude) and `X` a tangent vector at `u` with components of order one.
pub fn sphere_samples(count: usize, seed: u64) -> Vec<(Vec3, Vec3)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let z: f64 = rng.random_range(-1.0..1.0);
            let (s, c) = rng.random_range(0.0..TAU).sin_cos();
            let r = (1.0 - z * z).max(0.0).sqrt();
            let u = Vec3::new([r * c, r * s, z]);
            let x = Vec3::new([0; 3].map(|_| rng.random_range(-1.0..1.0)));
            (u, tangent_part(&u, &x))
        })
        .collect()
}
