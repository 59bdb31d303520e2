//! Closed-form geometry of embedded target manifolds.
//!
//! [`Sphere`] is the unit sphere in R^3 with potential `u_3`; [`FlatTorus`]
//! is the Clifford torus in R^4 and serves as a zero-curvature control.

mod killing;
pub mod sphere;
mod torus;

pub use killing::{hermitian_hessian_residual, killing_symmetry_residual, tangent_basis};
pub use sphere::Sphere;
pub use torus::FlatTorus;

use crate::{AmbientVector, Result};

/// Tolerance on `||u| - 1|` for inputs that must lie on the sphere.
pub const UNIT_TOL: f64 = 1e-9;
/// Tolerance on `|u . X| / (1 + |X|)` for inputs that must be tangent.
pub const TANGENT_TOL: f64 = 1e-9;

/// The pieces of target geometry the evolver needs. All methods except
/// [`Target::project_point`] assume `u` already lies on the manifold.
pub trait Target<const K: usize>: Sync {
    fn project_point(&self, p: AmbientVector<K>) -> Result<AmbientVector<K>>;

    fn project_tangent(&self, u: &AmbientVector<K>, x: &AmbientVector<K>) -> AmbientVector<K>;

    fn potential(&self, u: &AmbientVector<K>) -> f64;

    fn grad_potential(&self, u: &AmbientVector<K>) -> AmbientVector<K>;

    /// Lorentzian trace `A(u)(u_t, u_t) - A(u)(u_x, u_x)` of the second
    /// fundamental form.
    fn sff_trace_lorentz(&self, u: &AmbientVector<K>, ut: &AmbientVector<K>, ux: &AmbientVector<K>)
        -> AmbientVector<K>;

    /// How far `p` is from satisfying the embedding constraint.
    fn constraint_defect(&self, p: &AmbientVector<K>) -> f64;

    /// Follows the geodesic through `u` with velocity `v` for time `t`,
    /// returning the endpoint and the parallel-transported velocity.
    fn geodesic(&self, u: &AmbientVector<K>, v: &AmbientVector<K>, t: f64) -> (AmbientVector<K>, AmbientVector<K>);
}
