#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use super::{Target, TANGENT_TOL, UNIT_TOL};
use crate::{AmbientVector, Error, Result};

type Vec4 = AmbientVector<4>;

/// The Clifford torus `S^1 × S^1 ⊂ R^4`, points `(cos a, sin a, cos b, sin b)`,
/// with potential `Λ = cos a`. Flat, so any curvature coupling between the
/// two factors is a bug.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FlatTorus;

impl FlatTorus {
    pub fn point(a: f64, b: f64) -> Vec4 {
        Vec4::new([a.cos(), a.sin(), b.cos(), b.sin()])
    }

    /// The two angles of a point on the torus.
    pub fn angles(p: &Vec4) -> (f64, f64) {
        (p[1].atan2(p[0]), p[3].atan2(p[2]))
    }

    /// Unit tangent vectors along the first and second factor at `u`.
    pub fn frame(u: &Vec4) -> (Vec4, Vec4) {
        (Vec4::new([-u[1], u[0], 0.0, 0.0]), Vec4::new([0.0, 0.0, -u[3], u[2]]))
    }

    /// Complex structure rotating the first factor's direction into the second's.
    pub fn complex_structure(&self, u: &Vec4, x: &Vec4) -> Result<Vec4> {
        let defect = self.constraint_defect(u);
        if defect > UNIT_TOL {
            return Err(Error::Precondition { what: "point not on the torus", node: None, value: defect });
        }
        let normal = (*x - self.project_tangent(u, x)).norm();
        if normal > TANGENT_TOL * (1.0 + x.norm()) {
            return Err(Error::Precondition { what: "vector not tangent", node: None, value: normal });
        }
        let (ea, eb) = Self::frame(u);
        let (alpha, beta) = (x.dot(&ea), x.dot(&eb));
        Ok(eb * alpha - ea * beta)
    }
}

fn pair_norm(p: &Vec4, k: usize) -> f64 {
    (p[2 * k] * p[2 * k] + p[2 * k + 1] * p[2 * k + 1]).sqrt()
}

impl Target<4> for FlatTorus {
    fn project_point(&self, p: Vec4) -> Result<Vec4> {
        let (r0, r1) = (pair_norm(&p, 0), pair_norm(&p, 1));
        if !(r0 > 0.0 && r1 > 0.0) || !(r0.is_finite() && r1.is_finite()) {
            return Err(Error::Domain("cannot project onto the torus: a factor vanishes"));
        }
        Ok(Vec4::new([p[0] / r0, p[1] / r0, p[2] / r1, p[3] / r1]))
    }

    fn project_tangent(&self, u: &Vec4, x: &Vec4) -> Vec4 {
        let (ea, eb) = Self::frame(u);
        ea * x.dot(&ea) + eb * x.dot(&eb)
    }

    fn potential(&self, u: &Vec4) -> f64 {
        u[0]
    }

    fn grad_potential(&self, u: &Vec4) -> Vec4 {
        self.project_tangent(u, &Vec4::basis(0))
    }

    fn sff_trace_lorentz(&self, u: &Vec4, ut: &Vec4, ux: &Vec4) -> Vec4 {
        let l0 = ux[0] * ux[0] + ux[1] * ux[1] - ut[0] * ut[0] - ut[1] * ut[1];
        let l1 = ux[2] * ux[2] + ux[3] * ux[3] - ut[2] * ut[2] - ut[3] * ut[3];
        Vec4::new([l0 * u[0], l0 * u[1], l1 * u[2], l1 * u[3]])
    }

    fn constraint_defect(&self, p: &Vec4) -> f64 {
        (pair_norm(p, 0) - 1.0).abs().max((pair_norm(p, 1) - 1.0).abs())
    }

    /// Each factor turns at its own constant angular rate.
    fn geodesic(&self, u: &Vec4, v: &Vec4, t: f64) -> (Vec4, Vec4) {
        let (mut p, mut w) = (*u, *v);
        for k in [0, 2] {
            let rate = u[k] * v[k + 1] - u[k + 1] * v[k];
            let (s, c) = (rate * t).sin_cos();
            p.0[k] = c * u[k] - s * u[k + 1];
            p.0[k + 1] = s * u[k] + c * u[k + 1];
            w.0[k] = c * v[k] - s * v[k + 1];
            w.0[k + 1] = s * v[k] + c * v[k + 1];
        }
        (p, w)
    }
}
