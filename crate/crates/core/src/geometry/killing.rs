//! Finite-difference checks of the Killing-potential conditions on `S^2`.
//!
//! Both checks differentiate along great circles through `u` in an
//! orthonormal tangent basis `(e1, e2 = u × e1)`, in which `J` is the
//! rotation `[[0, -1], [1, 0]]`.

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use super::sphere::{self, tangent_part};
use crate::{Error, Result, Vec3};

/// Orthonormal basis of `T_u S^2` with `e2 = u × e1`.
pub fn tangent_basis(u: Vec3) -> Result<(Vec3, Vec3)> {
    // least aligned coordinate axis
    let mut axis = 0;
    for i in 1..3 {
        if u[i].abs() < u[axis].abs() {
            axis = i;
        }
    }
    let e1 = tangent_part(&u, &Vec3::basis(axis));
    let len = e1.norm();
    if len < 1e-8 {
        return Err(Error::Domain("degenerate tangent basis"));
    }
    let e1 = e1 * len.recip();
    Ok((e1, u.cross(&e1)))
}

fn geodesic(u: Vec3, dir: Vec3, s: f64) -> Vec3 {
    u * s.cos() + dir * s.sin()
}

fn check_step(fd_step: f64) -> Result<()> {
    if !(fd_step > 0.0 && fd_step <= 1e-2) {
        return Err(Error::Precondition { what: "fd_step must lie in (0, 1e-2]", node: None, value: fd_step });
    }
    Ok(())
}

/// Riemannian gradient at `p`: tangent part of the ambient central-difference
/// gradient of any extension of `f` to R^3.
fn riemannian_gradient<F: Fn(Vec3) -> f64>(f: &F, p: Vec3, h: f64) -> Vec3 {
    let mut g = Vec3::zero();
    for i in 0..3 {
        let e = Vec3::basis(i) * h;
        g[i] = (f(p + e) - f(p - e)) / (2.0 * h);
    }
    tangent_part(&p, &g)
}

/// 2x2 matrix of the covariant derivative of a tangent field `w` at `u`:
/// `m[a][b] = <D_{e_a} w, e_b>`.
fn covariant_derivative<W: Fn(Vec3) -> Vec3>(w: &W, u: Vec3, h: f64) -> Result<[[f64; 2]; 2]> {
    let (e1, e2) = tangent_basis(u)?;
    let basis = [e1, e2];
    let mut m = [[0.0; 2]; 2];
    for (a, ea) in basis.iter().enumerate() {
        let d = (w(geodesic(u, *ea, h)) - w(geodesic(u, *ea, -h))) * (0.5 / h);
        for (b, eb) in basis.iter().enumerate() {
            m[a][b] = d.dot(eb);
        }
    }
    Ok(m)
}

/// Largest singular value of a 2x2 matrix.
fn op_norm(m: [[f64; 2]; 2]) -> f64 {
    let [[a, b], [c, d]] = m;
    let frob = a * a + b * b + c * c + d * d;
    let det = a * d - b * c;
    let disc = (frob * frob - 4.0 * det * det).max(0.0).sqrt();
    ((frob + disc) / 2.0).sqrt()
}

/// `||HJ - JH||` for the covariant Hessian `H` of `candidate` at `u`. Zero
/// (up to `O(fd_step^2)` and rounding) exactly when the Hessian is
/// J-invariant, i.e. when `candidate` is a Killing potential near `u`.
pub fn hermitian_hessian_residual<F>(candidate: F, u: Vec3, fd_step: f64) -> Result<f64>
where
    F: Fn(Vec3) -> f64,
{
    sphere::project_tangent(u, Vec3::zero())?;
    check_step(fd_step)?;
    let grad = |p: Vec3| riemannian_gradient(&candidate, p, fd_step);
    let m = covariant_derivative(&grad, u, fd_step)?;
    let s = 0.5 * (m[0][1] + m[1][0]);
    let h = [[m[0][0], s], [s, m[1][1]]];
    let j = [[0.0, -1.0], [1.0, 0.0]];
    let mut c = [[0.0; 2]; 2];
    for r in 0..2 {
        for k in 0..2 {
            c[r][k] = (0..2).map(|i| h[r][i] * j[i][k] - j[r][i] * h[i][k]).sum();
        }
    }
    Ok(op_norm(c))
}

/// `||∇V + (∇V)^*||` at `u`: vanishes for Killing fields.
pub fn killing_symmetry_residual<W>(field: W, u: Vec3, fd_step: f64) -> Result<f64>
where
    W: Fn(Vec3) -> Vec3,
{
    sphere::project_tangent(u, Vec3::zero())?;
    check_step(fd_step)?;
    let m = covariant_derivative(&field, u, fd_step)?;
    Ok(op_norm([[2.0 * m[0][0], m[0][1] + m[1][0]], [m[0][1] + m[1][0], 2.0 * m[1][1]]]))
}

#[cfg(test)]
mod tests {
    use core::f64::consts::FRAC_1_SQRT_2;

    use super::*;
    use crate::geometry::sphere::{killing_unchecked, project_point};

    #[test]
    fn constant_potential_has_zero_commutator() {
        let u = project_point(Vec3::new([0.2, 0.5, -0.4])).unwrap();
        assert!(hermitian_hessian_residual(|_| 3.0, u, 1e-4).unwrap() <= 1e-10);
    }

    #[test]
    fn height_function_is_killing_potential() {
        let r = hermitian_hessian_residual(|p| p[2], Vec3::basis(0), 1e-4).unwrap();
        assert!(r <= 1e-6, "{r}");
    }

    // Oracle: for f = u1 u3 at u = (0, a, a), a = 1/√2, with e1 = (1,0,0) and
    // e2 = u × e1 = (0, a, -a), the covariant Hessian is P A P - (u.∇f) P
    // with A the ambient Hessian (A13 = A31 = 1) and u.∇f = 2 u1 u3 = 0:
    // H = [[0, -a], [-a, 0]], so HJ - JH = diag(-2a, 2a), norm 2a = √2.
    #[test]
    fn mixed_product_is_not_killing() {
        let u = Vec3::new([0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
        let r = hermitian_hessian_residual(|p| p[0] * p[2], u, 1e-4).unwrap();
        assert!((r - 2.0 * FRAC_1_SQRT_2).abs() < 1e-6, "{r}");
        assert!(r > 1e-2);
    }

    #[test]
    fn richardson_halving_shrinks_fd_error() {
        let u = project_point(Vec3::new([0.3, -0.6, 0.5])).unwrap();
        let f = |p: Vec3| p[0] * p[2];
        let exact_like = hermitian_hessian_residual(f, u, 1e-3).unwrap();
        let half = hermitian_hessian_residual(f, u, 5e-4).unwrap();
        assert!((exact_like - half).abs() < 1e-5);
    }

    #[test]
    fn rotation_field_is_killing_but_gradient_field_is_not() {
        let u = project_point(Vec3::new([0.1, 0.8, 0.3])).unwrap();
        let r = killing_symmetry_residual(|p| killing_unchecked(&p), u, 1e-4).unwrap();
        assert!(r <= 1e-6, "{r}");
        let g = killing_symmetry_residual(|p: Vec3| Vec3::basis(2) - p * p[2], u, 1e-4).unwrap();
        assert!(g > 0.1, "{g}");
    }

    #[test]
    fn rejects_bad_step_and_off_sphere_points() {
        assert!(hermitian_hessian_residual(|p| p[2], Vec3::basis(0), 0.5).is_err());
        assert!(hermitian_hessian_residual(|p| p[2], Vec3::new([2.0, 0.0, 0.0]), 1e-4).is_err());
    }
}
