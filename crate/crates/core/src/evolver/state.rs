use alloc::vec::Vec;

use crate::geometry::Target;
use crate::grid::{laplacian_into, Field, PeriodicGrid1D};
use crate::{AmbientVector, Error, Result};

/// Discrete map `u: grid → N` with its velocity `v = u_t` at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct MapState<const K: usize> {
    pub u: Field<K>,
    pub v: Field<K>,
    pub t: f64,
}

impl<const K: usize> MapState<K> {
    /// Builds a state at `t = 0` from initial data, projecting `u` onto the
    /// target and `v` onto the tangent spaces. A velocity with a normal
    /// component is accepted and projected, with a warning.
    pub fn new<T: Target<K>>(target: &T, u: Field<K>, v: Field<K>) -> Result<Self> {
        if u.grid() != v.grid() {
            return Err(Error::GridMismatch);
        }
        let values = u.values().iter().map(|p| target.project_point(*p)).collect::<Result<Vec<_>>>()?;
        let u = Field::new(*u.grid(), values)?;
        let projected = v.zip_map(&u, |vi, ui| target.project_tangent(ui, vi))?;
        let adjusted = v
            .values()
            .iter()
            .zip(projected.values())
            .filter(|(a, b)| (**a - **b).norm() > 1e-10 * (1.0 + a.norm()))
            .count();
        if adjusted > 0 {
            log::warn!("initial velocity not tangent at {adjusted} nodes; projected");
        }
        Ok(Self { u, v: projected, t: 0.0 })
    }

    pub fn at_rest<T: Target<K>>(target: &T, u: Field<K>) -> Result<Self> {
        let v = Field::zeros(*u.grid());
        Self::new(target, u, v)
    }

    pub fn grid(&self) -> &PeriodicGrid1D {
        self.u.grid()
    }

    /// `max_i dist(u_i, N)`.
    pub fn constraint_drift<T: Target<K>>(&self, target: &T) -> f64 {
        self.u.values().iter().fold(0.0, |m, p| m.max(target.constraint_defect(p)))
    }

    /// `max_i |v_i - P(u_i) v_i|`, the normal part of the velocity.
    pub fn tangency_drift<T: Target<K>>(&self, target: &T) -> f64 {
        self.u
            .values()
            .iter()
            .zip(self.v.values())
            .fold(0.0, |m, (u, v)| m.max((*v - target.project_tangent(u, v)).norm()))
    }

    /// Checks both state invariants, naming the first failing node.
    pub fn check<T: Target<K>>(&self, target: &T, constraint_tol: f64, tangency_tol: f64) -> Result<()> {
        for (i, (u, v)) in self.u.values().iter().zip(self.v.values()).enumerate() {
            if !(u.is_finite() && v.is_finite()) {
                return Err(Error::NonFinite { time: self.t, node: i });
            }
            let d = target.constraint_defect(u);
            if d > constraint_tol {
                return Err(Error::Precondition { what: "u leaves the target", node: Some(i), value: d });
            }
            let n = (*v - target.project_tangent(u, v)).norm();
            if n > tangency_tol {
                return Err(Error::Precondition { what: "v is not tangent", node: Some(i), value: n });
            }
        }
        Ok(())
    }
}

/// `u_tt` of the viscous wave map with potential at `state`. The state must
/// satisfy the default invariants of [`super::SolverConfig`].
pub fn acceleration<T: Target<K>, const K: usize>(target: &T, state: &MapState<K>, epsilon: f64) -> Result<Field<K>> {
    let defaults = super::SolverConfig::default();
    state.check(target, crate::geometry::UNIT_TOL, defaults.tangency_tol)?;
    let mut out = Field::zeros(*state.grid());
    let mut scratch = Scratch::new(state.grid().n());
    accel_into(
        target,
        state.u.values(),
        state.v.values(),
        state.grid().spacing(),
        epsilon,
        &mut scratch,
        out.values_mut(),
    );
    Ok(out)
}

pub(crate) struct Scratch<const K: usize> {
    lap_u: Vec<AmbientVector<K>>,
    lap_v: Vec<AmbientVector<K>>,
}

impl<const K: usize> Scratch<K> {
    pub(crate) fn new(n: usize) -> Self {
        Self { lap_u: alloc::vec![AmbientVector::zero(); n], lap_v: alloc::vec![AmbientVector::zero(); n] }
    }
}

/// `a_i = P(u_i) Δu_i + A(u_i)(v_i, v_i) - ∇Λ(u_i) + ε P(u_i) Δv_i`.
///
/// In the continuum `Δu + A_L(u; u_t, ∂_x u)` has the same tangential part;
/// taking the normal part as `A(u)(v, v)` alone makes `u · a = -|v|²` hold
/// exactly on the sphere, so the semi-discrete flow never leaves the
/// constraint set and projection only removes time-stepping error.
/// `εΔu_t - εT(u)Δu_t` is the tangential part `ε(Δu_t)^⊤`, taken directly.
pub(crate) fn accel_into<T: Target<K>, const K: usize>(
    target: &T,
    u: &[AmbientVector<K>],
    v: &[AmbientVector<K>],
    h: f64,
    epsilon: f64,
    scratch: &mut Scratch<K>,
    out: &mut [AmbientVector<K>],
) {
    laplacian_into(u, h, &mut scratch.lap_u);
    if epsilon > 0.0 {
        laplacian_into(v, h, &mut scratch.lap_v);
    }
    let still = AmbientVector::zero();
    for i in 0..u.len() {
        let mut a = target.project_tangent(&u[i], &scratch.lap_u[i]) + target.sff_trace_lorentz(&u[i], &v[i], &still)
            - target.grad_potential(&u[i]);
        if epsilon > 0.0 {
            a += target.project_tangent(&u[i], &scratch.lap_v[i]) * epsilon;
        }
        out[i] = a;
    }
}

#[cfg(test)]
mod tests {

    use super::*;
    use crate::geometry::{sphere, Sphere};
    use crate::grid::{diff1, laplacian, linf_norm};
    use crate::init::latitude;
    use crate::Vec3;

    fn circle(n: usize) -> PeriodicGrid1D {
        PeriodicGrid1D::circle(n).unwrap()
    }

    #[test]
    fn pole_is_an_equilibrium() {
        let g = circle(32);
        let s = MapState::at_rest(&Sphere, Field::from_fn(g, |_| sphere::E3)).unwrap();
        let a = acceleration(&Sphere, &s, 0.1).unwrap();
        assert!(a.values().iter().all(|v| *v == Vec3::zero()));
    }

    // Oracle: Δu = -u, λ = |u_x|² = 1, ∇Λ = e3 on the equator, so a = -e3.
    #[test]
    fn equator_accelerates_south() {
        for n in [64, 128] {
            let g = circle(n);
            let s = MapState::at_rest(&Sphere, latitude(g, 1, 0.0)).unwrap();
            let a = acceleration(&Sphere, &s, 0.0).unwrap();
            let h = g.spacing();
            for v in a.values() {
                assert!((*v + sphere::E3).max_abs() < h * h);
            }
        }
    }

    // Oracle: within the latitude ansatz τ(u) = k² cosθ ∇Λ(u), so the static
    // wave equation τ = ∇Λ holds for cosθ = 1/k².
    #[test]
    fn static_latitude_has_second_order_acceleration() {
        let err = |n| {
            let s = MapState::at_rest(&Sphere, latitude(circle(n), 2, 0.25)).unwrap();
            let a = acceleration(&Sphere, &s, 0.0).unwrap();
            let t = a.zip_map(&s.u, |ai, ui| *ai - *ui * ui.dot(ai)).unwrap();
            linf_norm(&t)
        };
        let (e1, e2) = (err(64), err(128));
        let order = (e1 / e2).log2();
        assert!((order - 2.0).abs() < 0.1, "{order}");
        assert!(e2 < 5e-3);
    }

    #[test]
    fn agrees_with_field_level_operators() {
        let g = circle(48);
        let u = crate::init::perturb(&latitude(g, 2, 0.3), 0.2, 11).unwrap();
        let v = Field::from_fn(g, |x| Vec3::new([x.sin(), 0.3, x.cos()]));
        let s = MapState::new(&Sphere, u, v).unwrap();
        let eps = 0.05;
        let got = acceleration(&Sphere, &s, eps).unwrap();
        let (lu, lv, ux) = (laplacian(&s.u), laplacian(&s.v), diff1(&s.u));
        let tangent = |u: Vec3, x: Vec3| x - u * u.dot(&x);
        for i in 0..g.n() {
            let (u, v, a) = (s.u.values()[i], s.v.values()[i], got.values()[i]);
            // tangential part: that of Δu + (|u_x|² - |v|²) u - ∇Λ + ε(Δv)^⊤
            let lam = ux.values()[i].norm_sq() - v.norm_sq();
            let full = lu.values()[i] + u * lam - (sphere::E3 - u * u[2]) + tangent(u, lv.values()[i]) * eps;
            assert!((tangent(u, a) - tangent(u, full)).max_abs() < 1e-12);
            // normal part: differentiating u · u_t = 0 gives u · u_tt = -|u_t|²
            assert!((u.dot(&a) + v.norm_sq()).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_state_names_the_node() {
        let g = circle(16);
        let mut s = MapState::at_rest(&Sphere, latitude(g, 1, 0.0)).unwrap();
        s.u.values_mut()[5] = Vec3::new([2.0, 0.0, 0.0]);
        let e = acceleration(&Sphere, &s, 0.0).unwrap_err();
        assert!(matches!(e, Error::Precondition { node: Some(5), .. }));
    }

    #[test]
    fn normal_initial_velocity_is_projected() {
        let g = circle(16);
        let u = latitude(g, 1, 0.0);
        let v = u.clone(); // purely normal
        let s = MapState::new(&Sphere, u, v).unwrap();
        assert!(s.v.values().iter().all(|w| w.norm() < 1e-15));
    }
}
