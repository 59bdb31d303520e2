//! Time integration of the viscous wave map with potential
//!
//! ```text
//! u_tt = Δu + (|u_x|² - |u_t|²) u - ∇Λ(u) + ε (Δu_t)^⊤
//! ```
//!
//! on a periodic 1D grid, together with its energy ledger and the ε-sweep.
//! `ε = 0` is the undamped wave map with potential.

mod energy;
mod run;
mod state;
mod sweep;

pub use energy::{check_energy_inequality, check_nonincreasing, energy_report, EnergyCheck, EnergyRecord};
pub use run::{evolve, step, Abort, EvolveOutcome, StepInfo};
pub use state::{acceleration, MapState};
pub use sweep::{
    check_eps_list, epsilon_sweep, member_config, sweep_from_runs, trajectory_deviation, SweepRow, SweepTable,
};

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use crate::grid::PeriodicGrid1D;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Kick-drift-kick. The drift follows geodesics of the target exactly,
    /// then `u` is renormalized and `v` re-projected against rounding.
    Leapfrog,
    /// Classical fourth-order Runge-Kutta on `(u, v)`, then the same
    /// constraint restoration.
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub epsilon: f64,
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    pub renormalize_every: usize,
    pub record_every: usize,
    /// Keep a full state every this many steps; 0 keeps only the final one.
    pub snapshot_every: usize,
    pub constraint_tol: f64,
    pub tangency_tol: f64,
    pub cfl_factor: f64,
    /// Abort when `max_i dist(u_i, N)` before restoration exceeds this.
    pub drift_abort: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.0,
            dt: 1e-3,
            t_end: 1.0,
            scheme: Scheme::Leapfrog,
            renormalize_every: 1,
            record_every: 1,
            snapshot_every: 0,
            constraint_tol: 1e-12,
            tangency_tol: 1e-10,
            cfl_factor: 0.5,
            drift_abort: 1e-3,
        }
    }
}

impl SolverConfig {
    /// Largest stable step on `grid`: `cfl_factor h`, further limited by
    /// `h² / 4ε` for the explicit viscous term.
    pub fn max_stable_dt(&self, grid: &PeriodicGrid1D) -> f64 {
        let h = grid.spacing();
        let mut dt = self.cfl_factor * h;
        if self.epsilon > 0.0 {
            dt = dt.min(h * h / (4.0 * self.epsilon));
        }
        dt
    }

    pub fn validate(&self, grid: &PeriodicGrid1D) -> Result<()> {
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Config("epsilon must be finite and nonnegative"));
        }
        if !(self.dt > 0.0) || !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(Error::Config("dt and t_end must be positive"));
        }
        if !(self.cfl_factor > 0.0 && self.cfl_factor <= 0.5) {
            return Err(Error::Config("cfl_factor must lie in (0, 0.5]"));
        }
        if self.renormalize_every == 0 || self.record_every == 0 {
            return Err(Error::Config("renormalize_every and record_every must be at least 1"));
        }
        if !(self.drift_abort > 0.0) {
            return Err(Error::Config("drift_abort must be positive"));
        }
        if self.dt > self.max_stable_dt(grid) * (1.0 + 1e-12) {
            return Err(Error::Config("dt violates the CFL guard (dt ≤ cfl h and dt ≤ h²/4ε)"));
        }
        Ok(())
    }

    /// Number of steps and the step actually taken, which divides `t_end`.
    pub fn steps(&self) -> (usize, f64) {
        let n = ((self.t_end / self.dt) - 1e-9).ceil().max(1.0) as usize;
        (n, self.t_end / n as f64)
    }
}
