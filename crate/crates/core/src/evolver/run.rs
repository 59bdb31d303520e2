use alloc::vec::Vec;

use super::state::{accel_into, Scratch};
use super::{energy_report, EnergyRecord, MapState, Scheme, SolverConfig};
use crate::geometry::Target;
use crate::grid::Field;
use crate::{AmbientVector, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    /// `max_i dist(u_i, N)` after the drift and before restoration.
    pub pre_restoration_drift: f64,
}

/// Advances `state` by exactly `dt`, restoring the constraints when
/// `restore` is set.
fn advance<T: Target<K>, const K: usize>(
    target: &T,
    state: &MapState<K>,
    config: &SolverConfig,
    dt: f64,
    restore: bool,
    scratch: &mut Scratch<K>,
) -> Result<(MapState<K>, StepInfo)> {
    let grid = *state.grid();
    let h = grid.spacing();
    let n = grid.n();
    let eps = config.epsilon;
    let mut a = alloc::vec![AmbientVector::<K>::zero(); n];
    let (u, v) = (state.u.values(), state.v.values());

    let (mut u1, mut v1): (Vec<_>, Vec<_>) = match config.scheme {
        Scheme::Leapfrog => {
            accel_into(target, u, v, h, eps, scratch, &mut a);
            // kick, keeping v tangent, then drift exactly along geodesics
            (0..n)
                .map(|i| {
                    let vh = target.project_tangent(&u[i], &(v[i] + a[i] * (0.5 * dt)));
                    target.geodesic(&u[i], &vh, dt)
                })
                .unzip()
        }
        Scheme::Rk4 => {
            let mut stage = |uu: &[AmbientVector<K>], vv: &[AmbientVector<K>]| {
                let mut out = alloc::vec![AmbientVector::<K>::zero(); n];
                accel_into(target, uu, vv, h, eps, scratch, &mut out);
                out
            };
            let axpy = |x: &[AmbientVector<K>], y: &[AmbientVector<K>], s: f64| -> Vec<AmbientVector<K>> {
                x.iter().zip(y).map(|(a, b)| *a + *b * s).collect()
            };
            let k1v = stage(u, v);
            let (u2, v2) = (axpy(u, v, 0.5 * dt), axpy(v, &k1v, 0.5 * dt));
            let k2v = stage(&u2, &v2);
            let (u3, v3) = (axpy(u, &v2, 0.5 * dt), axpy(v, &k2v, 0.5 * dt));
            let k3v = stage(&u3, &v3);
            let (u4, v4) = (axpy(u, &v3, dt), axpy(v, &k3v, dt));
            let k4v = stage(&u4, &v4);
            let s = dt / 6.0;
            let un = (0..n).map(|i| u[i] + (v[i] + v2[i] * 2.0 + v3[i] * 2.0 + v4[i]) * s).collect();
            let vn = (0..n).map(|i| v[i] + (k1v[i] + k2v[i] * 2.0 + k3v[i] * 2.0 + k4v[i]) * s).collect();
            (un, vn)
        }
    };

    let t_new = state.t + dt;
    let mut drift = 0.0f64;
    for (i, p) in u1.iter().enumerate() {
        if !p.is_finite() {
            return Err(Error::NonFinite { time: t_new, node: i });
        }
        drift = drift.max(target.constraint_defect(p));
    }
    if drift > config.drift_abort {
        return Err(Error::Instability { time: t_new, drift, threshold: config.drift_abort });
    }
    if restore {
        for (ui, vi) in u1.iter_mut().zip(v1.iter_mut()) {
            *ui = target.project_point(*ui)?;
            *vi = target.project_tangent(ui, vi);
        }
    }
    if config.scheme == Scheme::Leapfrog {
        accel_into(target, &u1, &v1, h, eps, scratch, &mut a);
        for (ui, (vi, ai)) in u1.iter().zip(v1.iter_mut().zip(&a)) {
            *vi += *ai * (0.5 * dt);
            if restore {
                *vi = target.project_tangent(ui, vi);
            }
        }
    }
    for (i, p) in v1.iter().enumerate() {
        if !p.is_finite() {
            return Err(Error::NonFinite { time: t_new, node: i });
        }
    }
    let next = MapState { u: Field::new(grid, u1)?, v: Field::new(grid, v1)?, t: t_new };
    Ok((next, StepInfo { pre_restoration_drift: drift }))
}

/// One step of size `config.dt` with constraint restoration.
pub fn step<T: Target<K>, const K: usize>(
    target: &T,
    state: &MapState<K>,
    config: &SolverConfig,
) -> Result<(MapState<K>, StepInfo)> {
    config.validate(state.grid())?;
    let mut scratch = Scratch::new(state.grid().n());
    advance(target, state, config, config.dt, true, &mut scratch)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Abort {
    pub time: f64,
    pub error: Error,
}

#[derive(Debug, Clone)]
pub struct EvolveOutcome<const K: usize> {
    /// Last valid state; the state at `t_end` unless the run aborted.
    pub final_state: MapState<K>,
    pub snapshots: Vec<MapState<K>>,
    pub ledger: Vec<EnergyRecord>,
    pub abort: Option<Abort>,
    pub max_pre_restoration_drift: f64,
    pub steps_taken: usize,
}

impl<const K: usize> EvolveOutcome<K> {
    pub fn completed(&self) -> bool {
        self.abort.is_none()
    }
}

/// Integrates from `initial` to `config.t_end` in `config.steps()` equal
/// steps. Ledger rows are taken at step 0, every `record_every` steps and at
/// the last step; snapshots likewise with `snapshot_every` (0: initial and
/// final state only). An instability or NaN stops the run and returns the
/// last valid state with [`EvolveOutcome::abort`] set.
pub fn evolve<T: Target<K>, const K: usize>(
    target: &T,
    initial: &MapState<K>,
    config: &SolverConfig,
) -> Result<EvolveOutcome<K>> {
    config.validate(initial.grid())?;
    let (n_steps, dt) = config.steps();
    let mut scratch = Scratch::new(initial.grid().n());
    let mut state = initial.clone();
    let mut ledger = alloc::vec![energy_report(target, &state)];
    let mut snapshots = alloc::vec![state.clone()];
    let mut abort = None;
    let mut max_drift = 0.0f64;
    let mut taken = 0;

    for k in 1..=n_steps {
        let restore = k % config.renormalize_every == 0 || k == n_steps;
        match advance(target, &state, config, dt, restore, &mut scratch) {
            Ok((next, info)) => {
                max_drift = max_drift.max(info.pre_restoration_drift);
                state = next;
                taken = k;
            }
            Err(error) => {
                log::warn!("run aborted at t = {}: {error}", state.t + dt);
                abort = Some(Abort { time: state.t + dt, error });
                break;
            }
        }
        if k % config.record_every == 0 || k == n_steps {
            ledger.push(energy_report(target, &state));
        }
        let snap =
            if config.snapshot_every == 0 { k == n_steps } else { k % config.snapshot_every == 0 || k == n_steps };
        if snap {
            snapshots.push(state.clone());
        }
    }
    if abort.is_some() && ledger.last().map(|r| r.t) != Some(state.t) {
        ledger.push(energy_report(target, &state));
    }
    Ok(EvolveOutcome {
        final_state: state,
        snapshots,
        ledger,
        abort,
        max_pre_restoration_drift: max_drift,
        steps_taken: taken,
    })
}
