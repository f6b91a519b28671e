//! Runge–Kutta–Merson integration with step-size control.
//!
//! Stages at `(0, 1/3, 1/3, 1/2, 1)`; update `y + dt (k1 + 4k4 + k5)/6`;
//! error estimate `dt (2k1 − 9k3 + 8k4 − k5)/30` in the max norm.

use crate::error::{FlowError, Result};

const SAFETY: f64 = 0.8;
const SHRINK_LIMIT: f64 = 0.25;
const GROW_LIMIT: f64 = 4.0;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: u64,
    pub rejected: u64,
    pub rhs_evals: u64,
}

/// Time, flattened state vector and the step size to try next.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub t: f64,
    pub y: Vec<f64>,
    pub dt: f64,
    pub stats: StepStats,
}

impl FlowState {
    pub fn new(y: Vec<f64>, dt: f64) -> Self {
        Self {
            t: 0.0,
            y,
            dt,
            stats: StepStats::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub tol: f64,
    pub min_dt: f64,
    /// With `false` every attempt is accepted and `dt` is left unchanged.
    pub adaptive: bool,
}

/// What one accepted step did.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub dt_used: f64,
    pub error: f64,
    /// Right-hand side at the start of the step.
    pub k1: Vec<f64>,
}

struct Stages {
    k: [Vec<f64>; 5],
    tmp: Vec<f64>,
}

impl Stages {
    fn new(n: usize) -> Self {
        Self {
            k: std::array::from_fn(|_| vec![0.0; n]),
            tmp: vec![0.0; n],
        }
    }
}

fn combine(out: &mut [f64], y: &[f64], dt: f64, terms: &[(f64, &[f64])]) {
    for i in 0..y.len() {
        let mut s = 0.0;
        for (c, k) in terms {
            s += c * k[i];
        }
        out[i] = y[i] + dt * s;
    }
}

/// Stages 2..5 given `k1` already in `st.k[0]`; returns the error estimate.
fn merson_stages<F>(rhs: &mut F, t: f64, y: &[f64], dt: f64, st: &mut Stages, evals: &mut u64) -> Result<f64>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let Stages { k, tmp } = st;
    let [k1, k2, k3, k4, k5] = k;
    combine(tmp, y, dt, &[(1.0 / 3.0, k1)]);
    *evals += 1;
    rhs(t + dt / 3.0, tmp, k2)?;
    combine(tmp, y, dt, &[(1.0 / 6.0, k1), (1.0 / 6.0, k2)]);
    *evals += 1;
    rhs(t + dt / 3.0, tmp, k3)?;
    combine(tmp, y, dt, &[(1.0 / 8.0, k1), (3.0 / 8.0, k3)]);
    *evals += 1;
    rhs(t + dt / 2.0, tmp, k4)?;
    combine(tmp, y, dt, &[(0.5, k1), (-1.5, k3), (2.0, k4)]);
    *evals += 1;
    rhs(t + dt, tmp, k5)?;
    let mut err = 0.0f64;
    for i in 0..y.len() {
        let e = (dt * (2.0 * k1[i] - 9.0 * k3[i] + 8.0 * k4[i] - k5[i]) / 30.0).abs();
        // NaN must count as a failure
        err = if e.is_nan() { f64::INFINITY } else { err.max(e) };
    }
    combine(tmp, y, dt, &[(1.0 / 6.0, k1), (4.0 / 6.0, k4), (1.0 / 6.0, k5)]);
    if tmp.iter().any(|v| !v.is_finite()) {
        err = f64::INFINITY;
    }
    Ok(err)
}

/// Proposed next step from the current one and its error estimate.
pub fn next_step_size(dt: f64, error: f64, tol: f64) -> f64 {
    let factor = if error == 0.0 {
        GROW_LIMIT
    } else {
        (SAFETY * (tol / error).powf(0.2)).clamp(SHRINK_LIMIT, GROW_LIMIT)
    };
    dt * factor
}

/// Advance `state` by one accepted Merson step, retrying with smaller steps
/// on rejection. A degenerate segment raised by an inner stage also counts as
/// a rejection and halves the step; the same failure at the first stage
/// cannot be cured by shrinking `dt` and is returned as is.
pub fn rkm_step<F>(state: &mut FlowState, rhs: &mut F, ctl: &StepControl) -> Result<StepReport>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let n = state.y.len();
    let mut st = Stages::new(n);
    state.stats.rhs_evals += 1;
    rhs(state.t, &state.y, &mut st.k[0])?;
    let k1 = st.k[0].clone();
    let mut dt = state.dt;
    loop {
        if dt < ctl.min_dt {
            return Err(FlowError::StepCollapse { t: state.t, dt });
        }
        let outcome = merson_stages(rhs, state.t, &state.y, dt, &mut st, &mut state.stats.rhs_evals);
        let error = match outcome {
            Ok(e) => e,
            Err(e) if matches!(e.root(), FlowError::DegenerateSegment { .. }) => {
                state.stats.rejected += 1;
                dt *= 0.5;
                continue;
            }
            Err(e) => return Err(e),
        };
        if !ctl.adaptive {
            state.y.copy_from_slice(&st.tmp);
            state.t += dt;
            state.stats.accepted += 1;
            return Ok(StepReport { dt_used: dt, error, k1 });
        }
        if error <= ctl.tol {
            state.y.copy_from_slice(&st.tmp);
            state.t += dt;
            state.dt = next_step_size(dt, error, ctl.tol);
            state.stats.accepted += 1;
            return Ok(StepReport { dt_used: dt, error, k1 });
        }
        state.stats.rejected += 1;
        dt = if error.is_finite() {
            next_step_size(dt, error, ctl.tol)
        } else {
            dt * SHRINK_LIMIT
        };
    }
}
