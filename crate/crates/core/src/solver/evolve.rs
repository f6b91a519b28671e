use crate::error::{FlowError, Result};

use super::merson::{rkm_step, FlowState, StepControl};
use super::system::{CurveFlow, StateDiagnostics};
use super::SolverConfig;

/// Consecutive slow steps needed before a run counts as stationary.
pub const STATIONARY_STREAK: usize = 10;

/// One row of the time series: the state reached after an accepted step of
/// size `dt` (the initial row has `dt = 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesRow {
    pub t: f64,
    pub dt: f64,
    pub diag: StateDiagnostics,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    EndTime,
    Stationary,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::EndTime => "end_time",
            StopReason::Stationary => "stationary",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Last accepted state, also on failure.
    pub state: FlowState,
    pub series: Vec<SeriesRow>,
    pub outcome: Result<StopReason>,
    /// Largest zero-mean residual of `α` over every right-hand-side evaluation.
    pub max_alpha_residual: f64,
    pub snapshots: usize,
}

/// Integrate from `t = 0` until `t_end` or stationarity. `sink` receives the
/// state at `t = 0`, at every multiple of the snapshot interval up to
/// `t_end`, and at the stopping time of a stationary run.
pub fn evolve(
    flow: &dyn CurveFlow,
    y0: Vec<f64>,
    cfg: &SolverConfig,
    sink: &mut dyn FnMut(f64, &[f64]),
) -> Trajectory {
    let mut state = FlowState::new(y0, cfg.initial_step());
    let mut series = Vec::new();
    let mut max_res: f64 = 0.0;
    let mut snapshots = 0;
    let outcome = drive(flow, cfg, sink, &mut state, &mut series, &mut max_res, &mut snapshots);
    Trajectory {
        state,
        series,
        outcome,
        max_alpha_residual: max_res,
        snapshots,
    }
}

fn drive(
    flow: &dyn CurveFlow,
    cfg: &SolverConfig,
    sink: &mut dyn FnMut(f64, &[f64]),
    state: &mut FlowState,
    series: &mut Vec<SeriesRow>,
    max_res: &mut f64,
    snapshots: &mut usize,
) -> Result<StopReason> {
    cfg.validate()?;
    let diag0 = flow.diagnostics(&state.y).map_err(|e| e.at_time(0.0))?;
    series.push(SeriesRow {
        t: 0.0,
        dt: 0.0,
        diag: diag0,
    });
    sink(0.0, &state.y);
    *snapshots += 1;

    let eps = cfg.stationary_eps_rel * diag0.length;
    let snap_dt = cfg.snapshot_interval();
    let last_snap = (cfg.t_end / snap_dt + 1e-9).floor() as usize;
    let mut next_snap = 1;
    let mut calm = 0;
    let ctl = StepControl {
        tol: cfg.rk_tol,
        min_dt: cfg.min_dt,
        adaptive: true,
    };
    let mut rhs = |_t: f64, y: &[f64], out: &mut [f64]| -> Result<()> {
        let r = flow.rhs(y, out)?;
        *max_res = max_res.max(r);
        Ok(())
    };
    let finish_tol = 1e-12 * cfg.t_end.max(1.0);

    loop {
        if cfg.t_end - state.t <= finish_tol {
            return Ok(StopReason::EndTime);
        }
        let target = if next_snap <= last_snap {
            (next_snap as f64 * snap_dt).min(cfg.t_end)
        } else {
            cfg.t_end
        };
        if cfg.stability_cap {
            state.dt = state.dt.min(flow.stable_step(&state.y));
        }
        let gap = target - state.t;
        let proposal = state.dt;
        let clipped = gap <= proposal;
        if clipped {
            state.dt = gap;
        }
        let y_prev = state.y.clone();
        let t_prev = state.t;
        let report = rkm_step(state, &mut rhs, &ctl).map_err(|e| e.at_time(t_prev))?;
        let reached = clipped && report.dt_used == gap;
        if reached {
            state.t = target;
            state.dt = proposal.max(state.dt);
        }
        let diag = flow.diagnostics(&state.y).map_err(|e| e.at_time(state.t))?;
        if !diag.length.is_finite() {
            return Err(FlowError::StepCollapse { t: state.t, dt: report.dt_used });
        }
        series.push(SeriesRow {
            t: state.t,
            dt: report.dt_used,
            diag,
        });
        let on_snapshot = reached && next_snap <= last_snap;
        if on_snapshot {
            sink(state.t, &state.y);
            *snapshots += 1;
            next_snap += 1;
        }
        if eps > 0.0 && flow.max_speed(&y_prev, &report.k1) < eps {
            calm += 1;
        } else {
            calm = 0;
        }
        if calm >= STATIONARY_STREAK {
            if !on_snapshot {
                sink(state.t, &state.y);
                *snapshots += 1;
            }
            return Ok(StopReason::Stationary);
        }
    }
}
