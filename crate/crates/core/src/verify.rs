//! Residual checks certifying that `w(t) = S_t ∘ u` solves the Schrödinger
//! flow `∂_t w = J(w) τ(w)` and, in 2D, the Ishimori system with `b = 0`.
//!
//! Rotations about the z-axis commute with `τ` and with `J`, so a residual
//! evaluated at `t = 0` certifies the whole orbit.

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use crate::evolver::MapState;
use crate::geometry::sphere::{killing_unchecked, rotate_z, tangent_part};
use crate::geometry::UNIT_TOL;
use crate::grid::poisson::solve_mean_removed;
use crate::grid::{
    diff1, diff_y, laplacian, poisson_solve_periodic, Field, Field2D, PeriodicGrid1D, PeriodicGrid2D, Scalar2D,
    DEFAULT_COMPATIBILITY_TOL,
};
use crate::{Error, Result, Vec3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    pub l2: f64,
    pub linf: f64,
    /// Node count per axis (`ny == 1` for 1D grids).
    pub nx: usize,
    pub ny: usize,
    /// Observed order against a coarser grid, when known.
    pub order: Option<f64>,
}

impl ResidualReport {
    /// `log2(coarse.l2 / self.l2)` for a grid with twice the resolution.
    pub fn with_order_from(mut self, coarse: &ResidualReport) -> Self {
        self.order = Some(refinement_order(coarse.l2, self.l2));
        self
    }
}

/// Observed convergence order between two errors on grids `h` and `h/2`.
pub fn refinement_order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

fn check_unit<'a>(values: impl Iterator<Item = &'a Vec3>) -> Result<()> {
    for (i, p) in values.enumerate() {
        let d = (p.norm() - 1.0).abs();
        if !(d <= UNIT_TOL) {
            return Err(Error::Precondition { what: "map leaves the unit sphere", node: Some(i), value: d });
        }
    }
    Ok(())
}

/// `r_i = V(u_i) - u_i × (Δ_h u + |∂_x u|² u)_i`, the `t = 0` residual of
/// `∂_t w - J(w) τ(w)` for `w(t) = S_t ∘ u`.
pub fn schrodinger_residual(u: &Field<3>) -> Result<ResidualReport> {
    check_unit(u.values().iter())?;
    let r = schrodinger_residual_field(u);
    Ok(ResidualReport {
        l2: crate::grid::l2_norm(&r),
        linf: crate::grid::linf_norm(&r),
        nx: u.len(),
        ny: 1,
        order: None,
    })
}

pub fn schrodinger_residual_field(u: &Field<3>) -> Field<3> {
    let lap = laplacian(u);
    let du = diff1(u);
    let values = (0..u.len())
        .map(|i| {
            let p = u.values()[i];
            let tau = lap.values()[i] + p * du.values()[i].norm_sq();
            killing_unchecked(&p) - p.cross(&tau)
        })
        .collect();
    Field::new(*u.grid(), values).expect("same grid")
}

/// Frames `S_{t_j} ∘ u` of the soliton generated by `u`.
pub fn build_soliton_frames(u: &Field<3>, times: &[f64]) -> Result<Vec<Field<3>>> {
    check_unit(u.values().iter())?;
    Ok(times.iter().map(|&t| u.map(|p| rotate_z(t, *p))).collect())
}

/// How the `x` axis of a 2D sheet is treated by the residual stencils.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XBoundary {
    Periodic,
    /// Rows are samples of an evolution in `x`; only interior rows are
    /// tested and one-sided differences are used at the ends.
    Open,
}

/// Stacks the maps of successive snapshots into a sheet `u(x, y)`: row `j`
/// is the `j`-th snapshot, columns are the 1D grid, and `x` is time. The
/// snapshots must be equally spaced in time; `hx` is that spacing.
pub fn sheet_from_snapshots(snapshots: &[MapState<3>]) -> Result<Field2D<3>> {
    if snapshots.len() < crate::grid::MIN_NODES {
        return Err(Error::Config("a sheet needs at least as many snapshots as a grid needs nodes"));
    }
    let y = *snapshots[0].grid();
    let hx = snapshots[1].t - snapshots[0].t;
    if !(hx > 0.0) {
        return Err(Error::Config("snapshots must advance in time"));
    }
    let mut values = Vec::with_capacity(snapshots.len() * y.n());
    for (j, s) in snapshots.iter().enumerate() {
        if s.grid() != &y {
            return Err(Error::GridMismatch);
        }
        if (s.t - snapshots[0].t - j as f64 * hx).abs() > 1e-9 * hx.max(s.t.abs()) {
            return Err(Error::Config("snapshots are not equally spaced in time"));
        }
        values.extend_from_slice(s.u.values());
    }
    let x = PeriodicGrid1D::new(snapshots.len(), hx * snapshots.len() as f64)?;
    Field2D::new(PeriodicGrid2D { x, y }, values)
}

/// Residual `e_3 × u - u × □u` with `□ = ∂_x² - ∂_y²`, the `t = 0` residual
/// of `∂_t s = s × □s` for `s(t) = S_t ∘ u`.
pub fn ishimori_residual(u: &Field2D<3>, x_boundary: XBoundary) -> Result<ResidualReport> {
    check_unit(u.values().iter())?;
    let g = *u.grid();
    let (nx, ny) = (g.x.n(), g.y.n());
    let (ihx2, ihy2) = (g.x.spacing().powi(-2), g.y.spacing().powi(-2));
    let rows: Vec<usize> = match x_boundary {
        XBoundary::Periodic => (0..nx).collect(),
        XBoundary::Open => (1..nx - 1).collect(),
    };
    let e3 = Vec3::basis(2);
    let (mut sum, mut max) = (0.0f64, 0.0f64);
    for &ix in &rows {
        let (xm, xp) = ((ix + nx - 1) % nx, (ix + 1) % nx);
        for iy in 0..ny {
            let (ym, yp) = ((iy + ny - 1) % ny, (iy + 1) % ny);
            let c = *u.at(ix, iy);
            let uxx = (*u.at(xp, iy) + *u.at(xm, iy) - c * 2.0) * ihx2;
            let uyy = (*u.at(ix, yp) + *u.at(ix, ym) - c * 2.0) * ihy2;
            let r = e3.cross(&c) - c.cross(&(uxx - uyy));
            sum += r.norm_sq();
            max = max.max(r.norm());
        }
    }
    Ok(ResidualReport { l2: (sum * g.cell_area()).sqrt(), linf: max, nx, ny, order: None })
}

#[derive(Debug, Clone)]
pub struct PhiReport {
    pub phi: Scalar2D,
    /// `2 s · (∂_x s × ∂_y s)`
    pub rhs: Scalar2D,
    /// `∫ rhs`; on closed sheets `8π deg(s)`, since `s · (∂_x s × ∂_y s)`
    /// is the pulled-back area density.
    pub compatibility: f64,
    /// `compatibility / 8π`, an integer up to discretization error on
    /// closed sheets.
    pub degree: f64,
    pub mean: f64,
    /// `||Δ_h φ - (rhs - mean)|| / ||rhs||` (0 when `rhs ≡ 0`).
    pub relative_residual: f64,
    /// Set when the mean had to be removed from an incompatible `rhs`.
    pub degree_warning: bool,
}

fn diff_x_with(s: &Field2D<3>, x_boundary: XBoundary) -> Field2D<3> {
    let g = *s.grid();
    let (nx, ny) = (g.x.n(), g.y.n());
    let hx = g.x.spacing();
    let mut out = Vec::with_capacity(g.len());
    for ix in 0..nx {
        for iy in 0..ny {
            let d = match (x_boundary, ix) {
                (XBoundary::Open, 0) => (*s.at(1, iy) - *s.at(0, iy)) * hx.recip(),
                (XBoundary::Open, i) if i == nx - 1 => (*s.at(i, iy) - *s.at(i - 1, iy)) * hx.recip(),
                _ => (*s.at((ix + 1) % nx, iy) - *s.at((ix + nx - 1) % nx, iy)) * (0.5 / hx),
            };
            out.push(d);
        }
    }
    Field2D::new(g, out).expect("same grid")
}

/// Recovers the auxiliary potential from `Δφ = 2 s · (∂_x s × ∂_y s)`.
/// With `b = 0` it does not feed back into `s`; it is a diagnostic.
pub fn ishimori_phi(s: &Field2D<3>, x_boundary: XBoundary) -> Result<PhiReport> {
    check_unit(s.values().iter())?;
    let g = *s.grid();
    let (sx, sy) = (diff_x_with(s, x_boundary), diff_y(s));
    let values = (0..g.len()).map(|i| 2.0 * s.values()[i].dot(&sx.values()[i].cross(&sy.values()[i]))).collect();
    let rhs = Scalar2D::new(g, values)?;
    let compatibility = rhs.integral();
    let mean = rhs.mean();
    let (phi, degree_warning) = match poisson_solve_periodic(&rhs, DEFAULT_COMPATIBILITY_TOL) {
        Ok(phi) => (phi, false),
        Err(Error::Compatibility { .. }) => {
            log::warn!("sheet has nonzero degree (∫rhs = {compatibility:e}); solving with the mean removed");
            (solve_mean_removed(&rhs), true)
        }
        Err(e) => return Err(e),
    };
    let lap = phi.laplacian();
    let norm = rhs.l2_norm();
    let diff: Vec<f64> = lap.values.iter().zip(&rhs.values).map(|(a, b)| a - (b - mean)).collect();
    let res = Scalar2D::new(g, diff)?.l2_norm();
    let relative_residual = if norm > 0.0 { res / norm } else { res };
    Ok(PhiReport {
        phi,
        rhs,
        compatibility,
        degree: compatibility / (8.0 * core::f64::consts::PI),
        mean,
        relative_residual,
        degree_warning,
    })
}

/// `max |M(u × X) - M(u) × M(X)|` over the samples.
pub fn intertwining_defect(map: impl Fn(Vec3) -> Vec3, samples: &[(Vec3, Vec3)]) -> f64 {
    samples.iter().map(|(u, x)| (map(u.cross(x)) - map(*u).cross(&map(*x))).max_abs()).fold(0.0, f64::max)
}

/// Certifies `J ∘ dS_α = dS_α ∘ J` on sample pairs `(u, X)`, `X ∈ T_u S²`.
pub fn holomorphic_isometry_check(alpha: f64, samples: &[(Vec3, Vec3)]) -> Result<f64> {
    for (u, x) in samples {
        check_unit(core::iter::once(u))?;
        if (tangent_part(u, x) - *x).norm() > crate::geometry::TANGENT_TOL * (1.0 + x.norm()) {
            return Err(Error::Precondition { what: "sample vector not tangent", node: None, value: u.dot(x) });
        }
    }
    Ok(intertwining_defect(|v| rotate_z(alpha, v), samples))
}

#[cfg(test)]
mod tests {
    use core::f64::consts::{PI, TAU};

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::elliptic::elliptic_residual;
    use crate::geometry::sphere::{project_point, E3};
    use crate::init::{constant, latitude, perturb};

    fn circle(n: usize) -> PeriodicGrid1D {
        PeriodicGrid1D::circle(n).unwrap()
    }

    #[test]
    fn pole_has_zero_residual() {
        let r = schrodinger_residual(&constant(circle(32), E3)).unwrap();
        assert_eq!((r.l2, r.linf), (0.0, 0.0));
    }

    #[test]
    fn exact_latitude_converges_at_second_order() {
        let a = schrodinger_residual(&latitude(circle(128), 2, -0.25)).unwrap();
        let b = schrodinger_residual(&latitude(circle(256), 2, -0.25)).unwrap().with_order_from(&a);
        let order = b.order.unwrap();
        assert!((order - 2.0).abs() < 0.3, "{order}");
    }

    #[test]
    fn equator_control_residual_is_killing_field() {
        let r = schrodinger_residual(&latitude(circle(256), 1, 0.0)).unwrap();
        assert!((r.linf - 1.0).abs() < 1e-12);
        assert!((r.l2 - TAU.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn schrodinger_and_elliptic_residuals_agree() {
        let g = circle(96);
        for seed in 0..5 {
            let u = perturb(&latitude(g, 2, -0.3), 0.4, seed).unwrap();
            let s = schrodinger_residual(&u).unwrap();
            let (e, _) = elliptic_residual(&u).unwrap();
            assert!((s.l2 - crate::grid::l2_norm(&e)).abs() < 1e-12);
        }
    }

    #[test]
    fn residual_norms_are_rotation_invariant() {
        let u = perturb(&latitude(circle(64), 2, -0.3), 0.3, 2).unwrap();
        let a = schrodinger_residual(&u).unwrap();
        let b = schrodinger_residual(&u.map(|p| rotate_z(1.3, *p))).unwrap();
        assert!((a.l2 - b.l2).abs() < 1e-12 && (a.linf - b.linf).abs() < 1e-12);
    }

    #[test]
    fn frames() {
        let u = perturb(&latitude(circle(64), 2, -0.25), 0.2, 4).unwrap();
        let f = build_soliton_frames(&u, &[0.0, TAU, 0.5, 2.0]).unwrap();
        assert_eq!(f[0], u);
        assert!(f[1].values().iter().zip(u.values()).all(|(a, b)| (*a - *b).max_abs() <= 1e-13));
        let e: std::vec::Vec<f64> = f.iter().map(crate::grid::dirichlet_energy).collect();
        assert!(e.iter().all(|x| (x - e[0]).abs() <= 1e-12));
    }

    // Guards the t = 0 reduction: difference the assembled frames in time at
    // t = 0.8 and compare with J(w)τ(w) there.
    #[test]
    fn residual_at_positive_time_matches() {
        let u = latitude(circle(256), 2, -0.25);
        let (t, dt) = (0.8, 1e-4);
        let f = build_soliton_frames(&u, &[t - dt, t, t + dt]).unwrap();
        let w = &f[1];
        let lap = laplacian(w);
        let du = diff1(w);
        let mut worst = 0.0f64;
        for i in 0..w.len() {
            let wt = (f[2].values()[i] - f[0].values()[i]) * (0.5 / dt);
            let p = w.values()[i];
            let jtau = p.cross(&(lap.values()[i] + p * du.values()[i].norm_sq()));
            worst = worst.max((wt - jtau).norm());
        }
        let at_zero = schrodinger_residual(&u).unwrap().linf;
        assert!((worst - at_zero).abs() < 1e-7, "{worst} vs {at_zero}");
    }

    #[test]
    fn ishimori_reduces_to_1d_for_x_only_sheets() {
        let gx = circle(64);
        let u = perturb(&latitude(gx, 2, -0.25), 0.2, 1).unwrap();
        let g = PeriodicGrid2D::new(64, 16, TAU, 1.0).unwrap();
        let sheet = Field2D::from_fn(g, |x, _| u.values()[(x / gx.spacing()).round() as usize % 64]);
        let r2 = ishimori_residual(&sheet, XBoundary::Periodic).unwrap();
        let r1 = schrodinger_residual(&u).unwrap();
        // L² over an extra unit-length y axis is unchanged
        assert!((r2.l2 - r1.l2).abs() < 1e-12);
        assert!((r2.linf - r1.linf).abs() < 1e-12);
    }

    #[test]
    fn ishimori_pole_sheet() {
        let g = PeriodicGrid2D::new(16, 16, TAU, TAU).unwrap();
        let s = Field2D::from_fn(g, |_, _| E3);
        assert_eq!(ishimori_residual(&s, XBoundary::Periodic).unwrap().l2, 0.0);
        let p = ishimori_phi(&s, XBoundary::Periodic).unwrap();
        assert!(p.rhs.values.iter().all(|v| *v == 0.0));
        assert!(p.phi.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn y_independent_sheet_has_zero_rhs() {
        let g = PeriodicGrid2D::new(32, 16, TAU, TAU).unwrap();
        let s = Field2D::from_fn(g, |x, _| {
            let th = 0.5 + 0.3 * x.sin();
            Vec3::new([th.sin() * x.cos(), th.sin() * x.sin(), th.cos()])
        });
        let p = ishimori_phi(&s, XBoundary::Periodic).unwrap();
        assert!(p.rhs.values.iter().all(|v| *v == 0.0));
        assert!(p.phi.values.iter().all(|v| *v == 0.0));
    }

    // A bump that wraps the sphere once: north pole at the centre, south
    // pole outside radius R. Oracle: the area density integrates to ±4π, so
    // the right-hand side (twice the density) integrates to ±8π.
    fn degree_one_sheet(n: usize) -> Field2D<3> {
        let g = PeriodicGrid2D::new(n, n, TAU, TAU).unwrap();
        let r_max = 2.5;
        Field2D::from_fn(g, |x, y| {
            let (dx, dy) = (x - PI, y - PI);
            let r = (dx * dx + dy * dy).sqrt();
            let th = if r >= r_max { PI } else { PI * (1.0 - (PI * r / r_max).cos()) / 2.0 };
            let phi = dy.atan2(dx);
            Vec3::new([th.sin() * phi.cos(), th.sin() * phi.sin(), th.cos()])
        })
    }

    #[test]
    fn degree_one_sheet_is_quantized() {
        let err =
            |n| (ishimori_phi(&degree_one_sheet(n), XBoundary::Periodic).unwrap().compatibility.abs() - 8.0 * PI).abs();
        let (a, b) = (err(64), err(128));
        assert!(b < 0.2, "{b}");
        let d = ishimori_phi(&degree_one_sheet(128), XBoundary::Periodic).unwrap().degree;
        assert!((d.abs() - 1.0).abs() < 0.01, "{d}");
        assert!(b < a);
        let p = ishimori_phi(&degree_one_sheet(64), XBoundary::Periodic).unwrap();
        assert!(p.degree_warning);
        assert!(p.relative_residual < 1e-10);
    }

    #[test]
    fn phi_recovery_on_compatible_sheet() {
        // degree zero: a bump that only reaches the equator
        let g = PeriodicGrid2D::new(48, 40, TAU, TAU).unwrap();
        let s = Field2D::from_fn(g, |x, y| {
            let th = 0.6 * x.sin() * y.cos() + 0.4;
            let ph = 0.8 * y.sin() + x;
            Vec3::new([th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()])
        });
        let p = ishimori_phi(&s, XBoundary::Periodic).unwrap();
        assert!(!p.degree_warning, "{}", p.compatibility);
        assert!(p.relative_residual <= 1e-10, "{}", p.relative_residual);
    }

    fn samples(n: usize) -> std::vec::Vec<(Vec3, Vec3)> {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        (0..n)
            .map(|_| {
                let mut draw = || Vec3::new([0; 3].map(|_| rng.random_range(-1.0..1.0)));
                let u = project_point(draw()).unwrap();
                let x = tangent_part(&u, &draw());
                (u, x)
            })
            .collect()
    }

    #[test]
    fn rotations_intertwine_j() {
        let s = samples(100);
        assert_eq!(holomorphic_isometry_check(0.0, &s).unwrap(), 0.0);
        assert!(holomorphic_isometry_check(PI / 3.0, &s).unwrap() <= 1e-13);
        // negative control: a rotation by π composed with z ↦ -z is improper
        let improper = |v: Vec3| {
            let r = rotate_z(PI, v);
            Vec3::new([r[0], r[1], -r[2]])
        };
        assert!(intertwining_defect(improper, &s) >= 0.1);
    }
}
