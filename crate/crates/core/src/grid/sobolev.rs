#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use super::{diff1, l2_norm, Field};
use crate::geometry::{Target, UNIT_TOL};
use crate::{Error, Result};

/// Discrete `H^{k,2}` norm `Σ_{l≤k} ||D^l s||_{L²}` of the section
/// `s = (v, ∂_x u)` of the pull-back bundle, where the covariant derivative
/// is project-then-difference: `D X = P(u) diff1(X)`.
pub fn sobolev_seminorm<T: Target<K>, const K: usize>(target: &T, u: &Field<K>, v: &Field<K>, k: usize) -> Result<f64> {
    if u.grid() != v.grid() {
        return Err(Error::GridMismatch);
    }
    if k > 4 {
        return Err(Error::Precondition { what: "derivative order above 4", node: None, value: k as f64 });
    }
    for (i, p) in u.values().iter().enumerate() {
        let defect = target.constraint_defect(p);
        if !(defect <= UNIT_TOL) {
            return Err(Error::Precondition { what: "map leaves the target", node: Some(i), value: defect });
        }
    }
    let project = |x: &Field<K>| x.zip_map(u, |xi, ui| target.project_tangent(ui, xi)).expect("same grid");
    let mut a = v.clone();
    let mut b = diff1(u);
    let mut total = 0.0;
    for l in 0..=k {
        total += (l2_norm(&a).powi(2) + l2_norm(&b).powi(2)).sqrt();
        if l < k {
            a = project(&diff1(&a));
            b = project(&diff1(&b));
        }
    }
    Ok(total)
}
