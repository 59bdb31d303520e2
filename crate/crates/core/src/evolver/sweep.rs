use alloc::vec::Vec;

use super::{evolve, EvolveOutcome, MapState, SolverConfig};
use crate::geometry::Target;
use crate::grid::{l2_norm, linf_norm};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub epsilon: f64,
    /// `sup_t ||u_ε - u_0||_{L²}` over the shared snapshot times.
    pub sup_l2: f64,
    pub sup_linf: f64,
    pub aborted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Rows with `ε > 0` that completed, in sweep order.
    fn viscous_rows(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| r.epsilon > 0.0 && !r.aborted)
    }

    /// `dev(ε_i) / dev(ε_{i+1})` for consecutive completed viscous rows.
    pub fn ratios(&self) -> Vec<f64> {
        let devs: Vec<f64> = self.viscous_rows().map(|r| r.sup_l2).collect();
        devs.windows(2).map(|w| w[0] / w[1]).collect()
    }

    /// Deviations shrink as ε decreases, allowing each to exceed its
    /// predecessor by the relative `slack`.
    pub fn is_monotone(&self, slack: f64) -> bool {
        let devs: Vec<f64> = self.viscous_rows().map(|r| r.sup_l2).collect();
        devs.windows(2).all(|w| w[1] <= w[0] * (1.0 + slack))
    }
}

/// Largest L² and L∞ distance between the maps of two runs over the
/// snapshots they share.
pub fn trajectory_deviation<const K: usize>(a: &[MapState<K>], b: &[MapState<K>]) -> Result<(f64, f64)> {
    let mut sup = (0.0f64, 0.0f64);
    for (sa, sb) in a.iter().zip(b) {
        let d = sa.u.zip_map(&sb.u, |x, y| *x - *y)?;
        sup = (sup.0.max(l2_norm(&d)), sup.1.max(linf_norm(&d)));
    }
    Ok(sup)
}

pub fn check_eps_list(eps_list: &[f64]) -> Result<()> {
    if eps_list.is_empty() || eps_list.iter().any(|e| !(*e >= 0.0)) {
        return Err(Error::Config("eps_list must be nonempty and nonnegative"));
    }
    if eps_list.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::Config("eps_list must be sorted in descending order"));
    }
    if *eps_list.last().expect("nonempty") != 0.0 {
        return Err(Error::Config("eps_list must end with the reference value 0"));
    }
    Ok(())
}

/// The configuration each member of a sweep runs with: snapshots at the
/// ledger cadence so every run is sampled at the same times.
pub fn member_config(config: &SolverConfig, epsilon: f64) -> SolverConfig {
    SolverConfig { epsilon, snapshot_every: config.record_every, ..*config }
}

/// Assembles the sweep table from finished runs, one per entry of
/// `eps_list`, the last being the `ε = 0` reference.
pub fn sweep_from_runs<const K: usize>(eps_list: &[f64], runs: &[EvolveOutcome<K>]) -> Result<SweepTable> {
    check_eps_list(eps_list)?;
    if runs.len() != eps_list.len() {
        return Err(Error::Config("one run per epsilon is required"));
    }
    let reference = runs.last().expect("nonempty");
    let mut rows = Vec::with_capacity(runs.len());
    for (eps, run) in eps_list.iter().zip(runs) {
        let (sup_l2, sup_linf) = trajectory_deviation(&run.snapshots, &reference.snapshots)?;
        rows.push(SweepRow { epsilon: *eps, sup_l2, sup_linf, aborted: !run.completed() });
    }
    Ok(SweepTable { rows })
}

/// Runs [`evolve`] for every ε on the same data and step, sequentially.
pub fn epsilon_sweep<T: Target<K>, const K: usize>(
    target: &T,
    initial: &MapState<K>,
    config: &SolverConfig,
    eps_list: &[f64],
) -> Result<SweepTable> {
    check_eps_list(eps_list)?;
    let runs =
        eps_list.iter().map(|&e| evolve(target, initial, &member_config(config, e))).collect::<Result<Vec<_>>>()?;
    sweep_from_runs(eps_list, &runs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{sphere, Sphere};
    use crate::grid::{Field, PeriodicGrid1D};

    #[test]
    fn reference_only_sweep() {
        let g = PeriodicGrid1D::circle(32).unwrap();
        let s = MapState::at_rest(&Sphere, crate::init::latitude(g, 1, 0.2)).unwrap();
        let c = SolverConfig { dt: g.spacing() / 4.0, t_end: 0.5, record_every: 10, ..Default::default() };
        let t = epsilon_sweep(&Sphere, &s, &c, &[0.0]).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.rows[0].sup_l2, 0.0);
    }

    #[test]
    fn equilibrium_is_epsilon_independent() {
        let g = PeriodicGrid1D::circle(32).unwrap();
        let s = MapState::at_rest(&Sphere, Field::from_fn(g, |_| sphere::E3)).unwrap();
        let c = SolverConfig { dt: 1e-3, t_end: 0.5, record_every: 25, ..Default::default() };
        let t = epsilon_sweep(&Sphere, &s, &c, &[0.1, 0.05, 0.0]).unwrap();
        assert!(t.rows.iter().all(|r| r.sup_l2 <= 1e-12 && r.sup_linf <= 1e-12));
    }

    #[test]
    fn rejects_bad_lists() {
        let g = PeriodicGrid1D::circle(32).unwrap();
        let s = MapState::at_rest(&Sphere, Field::from_fn(g, |_| sphere::E3)).unwrap();
        let c = SolverConfig { dt: 1e-3, t_end: 0.1, ..Default::default() };
        assert!(epsilon_sweep(&Sphere, &s, &c, &[0.0, 0.1]).is_err());
        assert!(epsilon_sweep(&Sphere, &s, &c, &[0.1, 0.05]).is_err());
        assert!(epsilon_sweep(&Sphere, &s, &c, &[]).is_err());
    }

    #[test]
    fn monotonicity_and_ratios() {
        let row = |epsilon, sup_l2| SweepRow { epsilon, sup_l2, sup_linf: sup_l2, aborted: false };
        let t = SweepTable { rows: alloc::vec![row(0.1, 0.4), row(0.05, 0.2), row(0.025, 0.1), row(0.0, 0.0)] };
        assert!(t.is_monotone(0.1));
        assert_eq!(t.ratios(), alloc::vec![2.0, 2.0]);
        let t = SweepTable { rows: alloc::vec![row(0.1, 0.4), row(0.05, 0.5), row(0.0, 0.0)] };
        assert!(!t.is_monotone(0.1));
    }
}
