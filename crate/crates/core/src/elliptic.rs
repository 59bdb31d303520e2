//! Solitons of the Schrödinger flow on `S^1 → S^2`: solutions of the
//! elliptic equation `τ(u) = -∇Λ(u)`, the Euler-Lagrange equation of
//! `F(u) = E(u) - ∫Λ(u)`.
//!
//! The first variation of `F` along a tangent field `W` is
//! `-∫⟨τ(u) + ∇Λ(u), W⟩`, so `+(τ + ∇Λ)` is the descent direction.
//!
//! Nonconstant solutions such as the latitude circles `k² cosθ = -1` are
//! saddle points of `F` (`F` is minimized by the north pole), which plain
//! gradient flow cannot reach. [`Mode::ResidualDescent`] instead minimizes
//! `½ Σ|r_i|²` over the residual `r = τ + ∇Λ`, with a Sobolev
//! preconditioner `(I - Δ_h)^{-2}` that makes the step size grid-independent.

use alloc::vec::Vec;

use crate::geometry::sphere::{grad_unchecked, tangent_part};
use crate::geometry::UNIT_TOL;
use crate::grid::{dirichlet_energy, integrate, laplacian, Field};
use crate::{Error, Result, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    GradientFlow,
    ResidualDescent,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticConfig {
    /// Step of the explicit heat-flow iteration; must not exceed `h²/4`.
    pub flow_dt: f64,
    pub max_iters: usize,
    /// Stop once the discrete L∞ residual falls below this.
    pub residual_target: f64,
    pub mode: Mode,
}

impl Default for EllipticConfig {
    fn default() -> Self {
        Self { flow_dt: 1e-4, max_iters: 100_000, residual_target: 1e-8, mode: Mode::GradientFlow }
    }
}

impl EllipticConfig {
    /// Config using the largest stable flow step on a grid of spacing `h`.
    pub fn for_spacing(h: f64, mode: Mode) -> Self {
        Self { flow_dt: h * h / 4.0, mode, ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryRow {
    pub iter: usize,
    pub f: f64,
    pub residual_linf: f64,
}

#[derive(Debug, Clone)]
pub struct EllipticSolution {
    /// Best iterate (the last one; every accepted step lowers the objective).
    pub u: Field<3>,
    pub history: Vec<HistoryRow>,
    pub converged: bool,
}

fn check_unit(u: &Field<3>) -> Result<()> {
    for (i, p) in u.values().iter().enumerate() {
        let d = (p.norm() - 1.0).abs();
        if !(d <= UNIT_TOL) {
            return Err(Error::Precondition { what: "map leaves the unit sphere", node: Some(i), value: d });
        }
    }
    Ok(())
}

/// `F(u) = ½||∂_x u||² - ∫ u_3`.
pub fn functional_f(u: &Field<3>) -> Result<f64> {
    check_unit(u)?;
    Ok(functional_unchecked(u))
}

fn functional_unchecked(u: &Field<3>) -> f64 {
    let heights: Vec<f64> = u.values().iter().map(|p| p[2]).collect();
    dirichlet_energy(u) - integrate(u.grid(), &heights)
}

/// Discrete tension `τ_h(u) = P(u) Δ_h u`, the tangential part of
/// `Δ_h u + |∂_x u|² u`.
pub fn tension(u: &Field<3>) -> Field<3> {
    let lap = laplacian(u);
    lap.zip_map(u, |l, p| tangent_part(p, l)).expect("same grid")
}

fn residual_unchecked(u: &Field<3>) -> Field<3> {
    let lap = laplacian(u);
    lap.zip_map(u, |l, p| tangent_part(p, l) + grad_unchecked(p)).expect("same grid")
}

fn linf(f: &Field<3>) -> f64 {
    f.values().iter().fold(0.0, |m, v| m.max(v.norm()))
}

/// `r = τ(u) + ∇Λ(u)` nodewise, and its L∞ norm. The residual is tangent
/// by construction: the normal part of `Δ_h u + |∂_x u|² u` is a pure
/// `O(h²)` consistency error that no discrete map can cancel.
pub fn elliptic_residual(u: &Field<3>) -> Result<(Field<3>, f64)> {
    check_unit(u)?;
    let r = residual_unchecked(u);
    let n = linf(&r);
    Ok((r, n))
}

pub fn solve_elliptic(u_init: &Field<3>, config: &EllipticConfig) -> Result<EllipticSolution> {
    check_unit(u_init)?;
    let h = u_init.grid().spacing();
    if !(config.flow_dt > 0.0) || config.flow_dt > h * h / 4.0 * (1.0 + 1e-12) {
        return Err(Error::Config("flow_dt must lie in (0, h²/4]"));
    }
    if !(config.residual_target > 0.0) {
        return Err(Error::Config("residual_target must be positive"));
    }
    match config.mode {
        Mode::GradientFlow => gradient_flow(u_init, config),
        Mode::ResidualDescent => residual_descent(u_init, config),
    }
}

fn retract(u: &Field<3>, d: &Field<3>, s: f64) -> Field<3> {
    u.zip_map(d, |p, q| {
        let w = *p + *q * s;
        w * w.norm().recip()
    })
    .expect("same grid")
}

fn gradient_flow(u_init: &Field<3>, config: &EllipticConfig) -> Result<EllipticSolution> {
    let mut u = u_init.clone();
    let mut history = Vec::new();
    for iter in 0..=config.max_iters {
        let r = residual_unchecked(&u);
        let rn = linf(&r);
        history.push(HistoryRow { iter, f: functional_unchecked(&u), residual_linf: rn });
        if rn <= config.residual_target {
            return Ok(EllipticSolution { u, history, converged: true });
        }
        if iter == config.max_iters {
            break;
        }
        u = retract(&u, &r, config.flow_dt);
    }
    Ok(EllipticSolution { u, history, converged: false })
}

/// Solves `(I - Δ_h) x = b` on the periodic grid (cyclic tridiagonal system
/// by the Sherman-Morrison correction of the Thomas algorithm).
fn helmholtz_solve(b: &[Vec3], h: f64) -> Vec<Vec3> {
    let n = b.len();
    let off = -1.0 / (h * h);
    let diag = 1.0 + 2.0 / (h * h);
    let gamma = -diag;
    let mut main = alloc::vec![diag; n];
    main[0] = diag - gamma;
    main[n - 1] = diag - off * off / gamma;

    let thomas = |rhs: &[Vec3]| -> Vec<Vec3> {
        let mut c = alloc::vec![0.0; n];
        let mut d = alloc::vec![Vec3::zero(); n];
        c[0] = off / main[0];
        d[0] = rhs[0] * main[0].recip();
        for i in 1..n {
            let m = main[i] - off * c[i - 1];
            c[i] = off / m;
            d[i] = (rhs[i] - d[i - 1] * off) * m.recip();
        }
        for i in (0..n - 1).rev() {
            let next = d[i + 1];
            d[i] -= next * c[i];
        }
        d
    };
    let x = thomas(b);
    let mut e = alloc::vec![Vec3::zero(); n];
    e[0] = Vec3::new([gamma; 3]);
    e[n - 1] = Vec3::new([off; 3]);
    let z = thomas(&e);
    // z is the same in every component
    let (z0, zn) = (z[0][0], z[n - 1][0]);
    let denom = 1.0 + z0 + off * zn / gamma;
    x.iter()
        .zip(&z)
        .map(|(xi, zi)| {
            let mut out = *xi;
            for c in 0..3 {
                let fact = (x[0][c] + off * x[n - 1][c] / gamma) / denom;
                out[c] -= fact * zi[c];
            }
            out
        })
        .collect()
}

fn residual_descent(u_init: &Field<3>, config: &EllipticConfig) -> Result<EllipticSolution> {
    let h = u_init.grid().spacing();
    let objective = |r: &Field<3>| 0.5 * r.values().iter().map(|v| v.norm_sq()).sum::<f64>();
    let mut u = u_init.clone();
    let mut r = residual_unchecked(&u);
    let mut phi = objective(&r);
    let mut history = Vec::new();
    let mut step = 1.0f64;
    for iter in 0..=config.max_iters {
        let rn = linf(&r);
        history.push(HistoryRow { iter, f: functional_unchecked(&u), residual_linf: rn });
        if rn <= config.residual_target {
            return Ok(EllipticSolution { u, history, converged: true });
        }
        if iter == config.max_iters {
            break;
        }
        // gradient of ½Σ|r|² along tangent perturbations:
        // g = P(u) [Δ_h r - (u·Δ_h u + u_3) r]
        let lap_u = laplacian(&u);
        let lap_r = laplacian(&r);
        let g: Vec<Vec3> = (0..u.len())
            .map(|i| {
                let (p, ri) = (u.values()[i], r.values()[i]);
                let c = p.dot(&lap_u.values()[i]) + p[2];
                tangent_part(&p, &(lap_r.values()[i] - ri * c))
            })
            .collect();
        let pre = helmholtz_solve(&helmholtz_solve(&g, h), h);
        let d: Vec<Vec3> = u.values().iter().zip(&pre).map(|(p, q)| -tangent_part(p, q)).collect();
        let d = Field::new(*u.grid(), d)?;
        let slope: f64 = g.iter().zip(d.values()).map(|(a, b)| a.dot(b)).sum();
        if !(slope < 0.0) {
            break;
        }
        step = (2.0 * step).min(1e3);
        let mut accepted = false;
        for _ in 0..80 {
            let trial = retract(&u, &d, step);
            let r_trial = residual_unchecked(&trial);
            let phi_trial = objective(&r_trial);
            if phi_trial <= phi + 1e-4 * step * slope {
                u = trial;
                r = r_trial;
                phi = phi_trial;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok(EllipticSolution { u, history, converged: false })
}

#[cfg(test)]
mod tests {
    use core::f64::consts::{PI, TAU};

    use super::*;
    use crate::geometry::sphere::{rotate_z, E3};
    use crate::grid::PeriodicGrid1D;
    use crate::init::{constant, latitude, perturb};

    fn circle(n: usize) -> PeriodicGrid1D {
        PeriodicGrid1D::circle(n).unwrap()
    }

    fn c_of(k: f64, h: f64) -> f64 {
        (2.0 - 2.0 * (k * h).cos()) / (h * h)
    }

    #[test]
    fn functional_of_constants() {
        let g = circle(64);
        assert!((functional_f(&constant(g, E3)).unwrap() + TAU).abs() < 1e-13);
        assert!(functional_f(&constant(g, Vec3::basis(0))).unwrap().abs() < 1e-15);
    }

    // Oracle: F(θ, k) = π k² sin²θ - 2π cosθ on the latitude ansatz.
    #[test]
    fn functional_of_latitude() {
        let exact = 17.0 * PI / 4.0;
        let err = |n| (functional_f(&latitude(circle(n), 2, -0.25)).unwrap() - exact).abs();
        let (a, b) = (err(64), err(128));
        assert!(b < 0.01);
        assert!(((a / b).log2() - 2.0).abs() < 0.05);
    }

    #[test]
    fn residual_examples() {
        let g = circle(64);
        let (r, n) = elliptic_residual(&constant(g, E3)).unwrap();
        assert_eq!(n, 0.0);
        assert!(r.values().iter().all(|v| *v == Vec3::zero()));

        // latitude k = 2, cosθ = -1/4: second-order residual
        let res = |n| elliptic_residual(&latitude(circle(n), 2, -0.25)).unwrap().1;
        let (a, b) = (res(128), res(256));
        assert!(((a / b).log2() - 2.0).abs() < 0.05, "{}", (a / b).log2());

        // equator: τ = 0 so r = ∇Λ = e3
        let (r, n) = elliptic_residual(&latitude(g, 1, 0.0)).unwrap();
        assert!((n - 1.0).abs() < 1e-12);
        assert!(r.values().iter().all(|v| (*v - E3).max_abs() < 1e-12));
    }

    #[test]
    fn helmholtz_solve_inverts_the_operator() {
        let g = circle(40);
        let h = g.spacing();
        let b = Field::from_fn(g, |x| Vec3::new([x.sin(), (3.0 * x).cos() + 0.5, (x * 2.0).sin().powi(3)]));
        let x = Field::new(g, helmholtz_solve(b.values(), h)).unwrap();
        let lap = laplacian(&x);
        for i in 0..g.n() {
            let back = x.values()[i] - lap.values()[i];
            assert!((back - b.values()[i]).max_abs() < 1e-11);
        }
    }

    #[test]
    fn pole_converges_immediately() {
        let g = circle(32);
        let sol =
            solve_elliptic(&constant(g, E3), &EllipticConfig::for_spacing(g.spacing(), Mode::GradientFlow)).unwrap();
        assert!(sol.converged);
        assert_eq!(sol.history.len(), 1);
    }

    // F(pole) = -2π lies below every latitude value, so the flow from near
    // the pole ends at the pole.
    #[test]
    fn gradient_flow_finds_the_pole() {
        let g = circle(64);
        let init = perturb(&constant(g, E3), 0.1, 3).unwrap();
        let cfg = EllipticConfig::for_spacing(g.spacing(), Mode::GradientFlow);
        let sol = solve_elliptic(&init, &cfg).unwrap();
        assert!(sol.converged);
        assert!((functional_f(&sol.u).unwrap() + TAU).abs() < 1e-6);
        assert!(sol.history.windows(2).all(|w| w[1].f <= w[0].f + 1e-14));
        assert!(sol.u.values().iter().all(|p| (*p - E3).norm() < 1e-6));
    }

    // Discrete oracle: on the ansatz the tangential residual vanishes iff
    // c_k(h) cosθ = -1 with c_k(h) = (2 - 2cos kh)/h².
    #[test]
    fn residual_descent_finds_the_discrete_latitude() {
        let g = circle(128);
        let init = perturb(&latitude(g, 2, -0.25), 0.01, 7).unwrap();
        let cfg = EllipticConfig { max_iters: 5000, ..EllipticConfig::for_spacing(g.spacing(), Mode::ResidualDescent) };
        let sol = solve_elliptic(&init, &cfg).unwrap();
        assert!(sol.converged, "{:?}", sol.history.last());
        assert!(elliptic_residual(&sol.u).unwrap().1 <= 1e-8);
        let target = -1.0 / c_of(2.0, g.spacing());
        let err = sol.u.values().iter().fold(0.0f64, |m, p| m.max((p[2] - target).abs()));
        assert!(err <= 1e-7, "{err}");
    }

    #[test]
    fn solutions_are_rotation_equivariant() {
        let g = circle(64);
        let alpha = 0.7;
        let init = perturb(&latitude(g, 2, -0.25), 0.01, 9).unwrap();
        let cfg = EllipticConfig { max_iters: 5000, ..EllipticConfig::for_spacing(g.spacing(), Mode::ResidualDescent) };
        let a = solve_elliptic(&init, &cfg).unwrap();
        let b = solve_elliptic(&init.map(|p| rotate_z(alpha, *p)), &cfg).unwrap();
        let diff = a.u.map(|p| rotate_z(alpha, *p)).zip_map(&b.u, |x, y| *x - *y).unwrap();
        assert!(linf(&diff) < 1e-8, "{}", linf(&diff));
    }

    #[test]
    fn rejects_unstable_flow_step() {
        let g = circle(32);
        let cfg = EllipticConfig { flow_dt: g.spacing(), ..Default::default() };
        assert!(matches!(solve_elliptic(&constant(g, E3), &cfg), Err(Error::Config(_))));
    }
}
