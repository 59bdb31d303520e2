//! The unit sphere `S^2 ⊂ R^3` with potential `Λ(u) = u_3`, complex structure
//! `J(u) = u×`, Killing field `V(u) = e_3 × u` and its flow, the rotations
//! about the z-axis.
//!
//! The free functions check their preconditions and are the public face of
//! the geometry; the [`Target`] impl skips the checks for use in hot loops.

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use super::{Target, TANGENT_TOL, UNIT_TOL};
use crate::{Error, Result, Vec3};

pub const E3: Vec3 = Vec3::new([0.0, 0.0, 1.0]);

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Sphere;

fn check_unit(u: &Vec3) -> Result<()> {
    let defect = (u.norm() - 1.0).abs();
    if defect > UNIT_TOL || !u.is_finite() {
        return Err(Error::Precondition { what: "point not on the unit sphere", node: None, value: defect });
    }
    Ok(())
}

fn check_tangent(u: &Vec3, x: &Vec3) -> Result<()> {
    let normal = u.dot(x).abs();
    if normal > TANGENT_TOL * (1.0 + x.norm()) {
        return Err(Error::Precondition { what: "vector not tangent", node: None, value: normal });
    }
    Ok(())
}

pub fn project_point(p: Vec3) -> Result<Vec3> {
    let r = p.norm();
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain("cannot project the origin onto the sphere"));
    }
    Ok(p * r.recip())
}

pub fn project_tangent(u: Vec3, x: Vec3) -> Result<Vec3> {
    check_unit(&u)?;
    Ok(tangent_part(&u, &x))
}

pub fn potential(u: Vec3) -> f64 {
    u[2]
}

/// `∇Λ(u) = e_3 - u_3 u`.
pub fn grad_potential(u: Vec3) -> Result<Vec3> {
    check_unit(&u)?;
    Ok(grad_unchecked(&u))
}

/// `V(u) = -u × e_3 = e_3 × u`.
pub fn killing_field(u: Vec3) -> Result<Vec3> {
    check_unit(&u)?;
    Ok(killing_unchecked(&u))
}

/// `J(u)X = u × X`.
pub fn complex_structure(u: Vec3, x: Vec3) -> Result<Vec3> {
    check_unit(&u)?;
    check_tangent(&u, &x)?;
    Ok(u.cross(&x))
}

/// `S_t(u)`: counterclockwise rotation about +z by angle `t`, the flow of
/// [`killing_field`].
pub fn isometry_flow(t: f64, u: Vec3) -> Result<Vec3> {
    check_unit(&u)?;
    Ok(rotate_z(t, u))
}

/// Rotation about the z-axis applied to any vector (points and tangent
/// vectors alike).
pub fn rotate_z(t: f64, u: Vec3) -> Vec3 {
    let (s, c) = t.sin_cos();
    Vec3::new([c * u[0] - s * u[1], s * u[0] + c * u[1], u[2]])
}

/// `(|u_x|^2 - |u_t|^2) u`: the normal correction that keeps `|u| ≡ 1` for
/// `u_tt - u_xx`.
pub fn sff_trace_lorentz(u: Vec3, ut: Vec3, ux: Vec3) -> Result<Vec3> {
    check_unit(&u)?;
    check_tangent(&u, &ut)?;
    check_tangent(&u, &ux)?;
    Ok(u * (ux.norm_sq() - ut.norm_sq()))
}

#[inline]
pub(crate) fn tangent_part(u: &Vec3, x: &Vec3) -> Vec3 {
    *x - *u * u.dot(x)
}

#[inline]
pub(crate) fn grad_unchecked(u: &Vec3) -> Vec3 {
    E3 - *u * u[2]
}

#[inline]
pub(crate) fn killing_unchecked(u: &Vec3) -> Vec3 {
    Vec3::new([-u[1], u[0], 0.0])
}

impl Target<3> for Sphere {
    fn project_point(&self, p: Vec3) -> Result<Vec3> {
        project_point(p)
    }

    #[inline]
    fn project_tangent(&self, u: &Vec3, x: &Vec3) -> Vec3 {
        tangent_part(u, x)
    }

    #[inline]
    fn potential(&self, u: &Vec3) -> f64 {
        u[2]
    }

    #[inline]
    fn grad_potential(&self, u: &Vec3) -> Vec3 {
        grad_unchecked(u)
    }

    #[inline]
    fn sff_trace_lorentz(&self, u: &Vec3, ut: &Vec3, ux: &Vec3) -> Vec3 {
        *u * (ux.norm_sq() - ut.norm_sq())
    }

    #[inline]
    fn constraint_defect(&self, p: &Vec3) -> f64 {
        (p.norm() - 1.0).abs()
    }

    /// Great circle: `u cos(|v|t) + (v/|v|) sin(|v|t)`.
    fn geodesic(&self, u: &Vec3, v: &Vec3, t: f64) -> (Vec3, Vec3) {
        let speed = v.norm();
        if speed == 0.0 {
            return (*u, *v);
        }
        let (s, c) = (speed * t).sin_cos();
        (*u * c + *v * (s / speed), *v * c - *u * (speed * s))
    }
}

#[cfg(test)]
mod tests {
    use core::f64::consts::{FRAC_PI_2, PI};

    use proptest::prelude::*;

    use super::*;

    fn close(a: Vec3, b: Vec3, tol: f64) -> bool {
        (a - b).max_abs() <= tol
    }

    #[test]
    fn project_point_examples() {
        assert_eq!(project_point(Vec3::new([0.0, 0.0, 2.0])).unwrap(), E3);
        assert_eq!(project_point(Vec3::basis(0)).unwrap(), Vec3::basis(0));
        let p = project_point(Vec3::new([3.0, 4.0, 0.0])).unwrap();
        assert!(close(p, Vec3::new([0.6, 0.8, 0.0]), 2e-16));
        assert!(matches!(project_point(Vec3::zero()), Err(Error::Domain(_))));
    }

    #[test]
    fn project_tangent_examples() {
        assert_eq!(project_tangent(E3, Vec3::basis(0)).unwrap(), Vec3::basis(0));
        assert_eq!(project_tangent(E3, Vec3::new([0.0, 0.0, 5.0])).unwrap(), Vec3::zero());
        let x = project_tangent(Vec3::basis(0), Vec3::new([1.0, 1.0, 0.0])).unwrap();
        assert_eq!(x, Vec3::basis(1));
        assert!(matches!(project_tangent(Vec3::new([2.0, 0.0, 0.0]), Vec3::basis(1)), Err(Error::Precondition { .. })));
    }

    #[test]
    fn grad_potential_examples() {
        assert_eq!(grad_potential(E3).unwrap(), Vec3::zero());
        assert_eq!(grad_potential(-E3).unwrap(), Vec3::zero());
        assert_eq!(grad_potential(Vec3::basis(0)).unwrap(), E3);
        assert!(grad_potential(Vec3::new([0.5, 0.0, 0.0])).is_err());
    }

    #[test]
    fn killing_field_examples() {
        assert_eq!(killing_field(Vec3::basis(0)).unwrap(), Vec3::basis(1));
        assert_eq!(killing_field(E3).unwrap(), Vec3::zero());
        assert_eq!(killing_field(Vec3::basis(1)).unwrap(), -Vec3::basis(0));
        // V = -u × e3 as written out
        let u = project_point(Vec3::new([0.3, -0.2, 0.9])).unwrap();
        assert!(close(killing_field(u).unwrap(), -u.cross(&E3), 1e-16));
    }

    #[test]
    fn complex_structure_examples() {
        assert_eq!(complex_structure(E3, Vec3::basis(0)).unwrap(), Vec3::basis(1));
        assert_eq!(complex_structure(E3, Vec3::basis(1)).unwrap(), -Vec3::basis(0));
        assert_eq!(complex_structure(Vec3::basis(0), E3).unwrap(), -Vec3::basis(1));
        assert!(complex_structure(E3, E3).is_err());
    }

    #[test]
    fn isometry_flow_examples() {
        let u = project_point(Vec3::new([0.3, -0.7, 0.2])).unwrap();
        assert_eq!(isometry_flow(0.0, u).unwrap(), u);
        assert!(close(isometry_flow(2.0 * PI, u).unwrap(), u, 1e-14));
        assert!(close(isometry_flow(FRAC_PI_2, Vec3::basis(0)).unwrap(), Vec3::basis(1), 1e-15));
    }

    // Oracle: integrate dS/dt = V(S) with classical RK4 at a fine step.
    #[test]
    fn isometry_flow_matches_integrated_killing_field() {
        let mut s = Vec3::basis(0);
        let steps = 2000;
        let h = FRAC_PI_2 / steps as f64;
        let f = |x: Vec3| killing_unchecked(&x);
        for _ in 0..steps {
            let k1 = f(s);
            let k2 = f(s + k1 * (h / 2.0));
            let k3 = f(s + k2 * (h / 2.0));
            let k4 = f(s + k3 * h);
            s += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        }
        assert!(close(s, Vec3::basis(1), 1e-12));
        assert!(close(isometry_flow(FRAC_PI_2, Vec3::basis(0)).unwrap(), s, 1e-12));
    }

    // Oracle for the sign of the curvature term: along the great circle
    // c(t) = cos(t) e3 + sin(t) e1 one has c'' = -c with |c'| = 1.
    #[test]
    fn sff_trace_examples() {
        assert_eq!(sff_trace_lorentz(E3, Vec3::zero(), Vec3::zero()).unwrap(), Vec3::zero());
        let got = sff_trace_lorentz(E3, Vec3::basis(0), Vec3::zero()).unwrap();
        assert_eq!(got, -E3);
        let c_tt = -E3; // c''(0)
        assert_eq!(got, c_tt);
        let got = sff_trace_lorentz(E3, Vec3::zero(), Vec3::basis(1)).unwrap();
        assert_eq!(got, E3);
        assert!(sff_trace_lorentz(E3, E3, Vec3::zero()).is_err());
    }

    fn unit() -> impl Strategy<Value = Vec3> {
        (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
            .prop_filter("nonzero", |(a, b, c)| a * a + b * b + c * c > 1e-3)
            .prop_map(|(a, b, c)| project_point(Vec3::new([a, b, c])).unwrap())
    }

    fn vector() -> impl Strategy<Value = Vec3> {
        (-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0).prop_map(|(a, b, c)| Vec3::new([a, b, c]))
    }

    proptest! {
        #[test]
        fn tangent_projection_is_idempotent(u in unit(), x in vector()) {
            let p = project_tangent(u, x).unwrap();
            let pp = project_tangent(u, p).unwrap();
            prop_assert!(close(p, pp, 1e-14));
            prop_assert!(u.dot(&p).abs() <= 1e-14);
        }

        #[test]
        fn gradient_is_j_of_killing_field(u in unit()) {
            let g = grad_potential(u).unwrap();
            let jv = u.cross(&killing_field(u).unwrap());
            prop_assert!(close(g, jv, 1e-14));
        }

        #[test]
        fn j_squared_is_minus_identity(u in unit(), x in vector()) {
            let x = project_tangent(u, x).unwrap();
            let jjx = complex_structure(u, complex_structure(u, x).unwrap()).unwrap();
            prop_assert!(close(jjx, -x, 1e-14));
        }

        #[test]
        fn rotations_form_a_group(u in unit(), t in -10.0f64..10.0, s in -10.0f64..10.0) {
            let lhs = isometry_flow(t, isometry_flow(s, u).unwrap()).unwrap();
            prop_assert!(close(lhs, isometry_flow(t + s, u).unwrap(), 1e-13));
        }

        #[test]
        fn rotations_commute_with_j(u in unit(), x in vector(), t in -10.0f64..10.0) {
            let x = project_tangent(u, x).unwrap();
            let lhs = rotate_z(t, u.cross(&x));
            let rhs = rotate_z(t, u).cross(&rotate_z(t, x));
            prop_assert!(close(lhs, rhs, 1e-13));
        }

        #[test]
        fn sff_trace_is_normal(u in unit(), a in vector(), b in vector()) {
            let ut = project_tangent(u, a).unwrap();
            let ux = project_tangent(u, b).unwrap();
            let n = sff_trace_lorentz(u, ut, ux).unwrap();
            prop_assert!(close(n, u * u.dot(&n), 1e-13));
        }
    }
}
