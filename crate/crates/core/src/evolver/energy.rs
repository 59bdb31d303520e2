use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use super::MapState;
use crate::geometry::Target;
use crate::grid::{dirichlet_energy, integrate, l2_norm, sobolev_seminorm};

/// One row of the energy ledger.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRecord {
    pub t: f64,
    /// `½ ||v||²`
    pub kinetic: f64,
    /// `½ ||∂_x u||²`, derivative on half nodes
    pub dirichlet: f64,
    /// `∫ Λ(u)`
    pub potential_integral: f64,
    /// `kinetic + dirichlet + potential_integral`
    pub hamiltonian: f64,
    pub constraint_drift: f64,
    pub tangency_drift: f64,
    pub h1_seminorm: f64,
}

pub fn energy_report<T: Target<K>, const K: usize>(target: &T, state: &MapState<K>) -> EnergyRecord {
    let kinetic = 0.5 * l2_norm(&state.v).powi(2);
    let dirichlet = dirichlet_energy(&state.u);
    let lambda: Vec<f64> = state.u.values().iter().map(|p| target.potential(p)).collect();
    let potential_integral = integrate(state.grid(), &lambda);
    // H^1 is a diagnostic; report NaN rather than fail on a drifted state.
    let h1_seminorm = sobolev_seminorm(target, &state.u, &state.v, 1).unwrap_or(f64::NAN);
    EnergyRecord {
        t: state.t,
        kinetic,
        dirichlet,
        potential_integral,
        hamiltonian: kinetic + dirichlet + potential_integral,
        constraint_drift: state.constraint_drift(target),
        tangency_drift: state.tangency_drift(target),
        h1_seminorm,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyCheck {
    pub pass: bool,
    pub max_violation: f64,
}

/// The two branches of the energy law for `H = E + ∫Λ`: for `ε > 0`,
/// `H(t) ≤ H(0) + tol`; for `ε = 0`, `|H(t) - H(0)| ≤ tol`.
///
/// `max_violation` is the largest excess over `H(0)` (resp. the largest
/// deviation from it), before subtracting `tol`.
pub fn check_energy_inequality(ledger: &[EnergyRecord], epsilon: f64, tol: f64) -> EnergyCheck {
    let Some(first) = ledger.first() else {
        return EnergyCheck { pass: true, max_violation: 0.0 };
    };
    let h0 = first.hamiltonian;
    let mut worst = 0.0f64;
    let mut finite = true;
    for r in ledger {
        finite &= r.hamiltonian.is_finite();
        let d = if epsilon > 0.0 { r.hamiltonian - h0 } else { (r.hamiltonian - h0).abs() };
        worst = worst.max(d);
    }
    EnergyCheck { pass: finite && worst <= tol, max_violation: worst }
}

/// `H(t_{j+1}) ≤ H(t_j) + tol` for consecutive ledger rows.
pub fn check_nonincreasing(ledger: &[EnergyRecord], tol: f64) -> EnergyCheck {
    let mut worst = 0.0f64;
    let mut finite = true;
    for w in ledger.windows(2) {
        finite &= w[1].hamiltonian.is_finite();
        worst = worst.max(w[1].hamiltonian - w[0].hamiltonian);
    }
    EnergyCheck { pass: finite && worst <= tol, max_violation: worst }
}

#[cfg(test)]
mod tests {
    use core::f64::consts::{PI, TAU};

    use super::*;
    use crate::geometry::{sphere, Sphere};
    use crate::grid::{Field, PeriodicGrid1D};
    use crate::init::latitude;

    fn record(h: f64) -> EnergyRecord {
        EnergyRecord {
            t: 0.0,
            kinetic: 0.0,
            dirichlet: 0.0,
            potential_integral: h,
            hamiltonian: h,
            constraint_drift: 0.0,
            tangency_drift: 0.0,
            h1_seminorm: 0.0,
        }
    }

    #[test]
    fn pole_energies() {
        let g = PeriodicGrid1D::circle(64).unwrap();
        let s = MapState::at_rest(&Sphere, Field::from_fn(g, |_| sphere::E3)).unwrap();
        let r = energy_report(&Sphere, &s);
        assert_eq!(r.kinetic, 0.0);
        assert_eq!(r.dirichlet, 0.0);
        assert!((r.potential_integral - TAU).abs() < 1e-13);
        assert!((r.hamiltonian - TAU).abs() < 1e-13);
    }

    #[test]
    fn equator_energies() {
        let g = PeriodicGrid1D::circle(128).unwrap();
        let s = MapState::at_rest(&Sphere, latitude(g, 1, 0.0)).unwrap();
        let r = energy_report(&Sphere, &s);
        let h = g.spacing();
        assert_eq!(r.kinetic, 0.0);
        assert!((r.dirichlet - PI).abs() < h * h);
        assert!(r.potential_integral.abs() < 1e-14);
        assert_eq!(r.hamiltonian, r.kinetic + r.dirichlet + r.potential_integral);
    }

    #[test]
    fn inequality_examples() {
        let l: Vec<_> = [1.0, 0.98, 0.97].into_iter().map(record).collect();
        assert!(check_energy_inequality(&l, 0.1, 1e-6).pass);
        let l: Vec<_> = [1.0, 1.1].into_iter().map(record).collect();
        let c = check_energy_inequality(&l, 0.1, 1e-6);
        assert!(!c.pass);
        assert!((c.max_violation - 0.1).abs() < 1e-12);
        let l: Vec<_> = [1.0, 1.0 + 1e-9].into_iter().map(record).collect();
        assert!(check_energy_inequality(&l, 0.0, 1e-6).pass);
        let l: Vec<_> = [1.0, 1.0 - 1e-3].into_iter().map(record).collect();
        assert!(!check_energy_inequality(&l, 0.0, 1e-6).pass);
        let l: Vec<_> = [1.0, 0.9, 0.95].into_iter().map(record).collect();
        assert!(check_energy_inequality(&l, 0.1, 1e-6).pass);
        assert!(!check_nonincreasing(&l, 1e-6).pass);
    }
}
