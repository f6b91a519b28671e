//! Time integration of the semi-discrete flow.

mod evolve;
mod merson;
mod rhs;
mod system;

pub use evolve::{evolve, SeriesRow, StopReason, Trajectory, STATIONARY_STREAK};
pub use merson::{next_step_size, rkm_step, FlowState, StepControl, StepReport, StepStats};
pub use rhs::{rhs_embedded, rhs_immersed, EmbeddedVelocity, ImmersedVelocity, DEGENERATE_RATIO};
pub use system::{stable_step_of, CurveFlow, EmbeddedFlow, ImmersedFlow, StateDiagnostics, MERSON_STABILITY_BOUND};

use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "defaults::nodes")]
    pub nodes: usize,
    #[serde(default = "defaults::delta")]
    pub delta: f64,
    #[serde(default = "defaults::rk_tol")]
    pub rk_tol: f64,
    /// Initial step; `4h²` with `h = 1/M` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_init: Option<f64>,
    pub t_end: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_dt: Option<f64>,
    /// Stop once the largest node speed stays below this multiple of the
    /// initial length. Zero disables the check.
    #[serde(default = "defaults::stationary_eps_rel")]
    pub stationary_eps_rel: f64,
    #[serde(default = "defaults::min_dt")]
    pub min_dt: f64,
    /// Keep `dt` inside the explicit stability region of the diffusion term.
    #[serde(default = "defaults::stability_cap")]
    pub stability_cap: bool,
}

mod defaults {
    pub fn nodes() -> usize {
        200
    }
    pub fn delta() -> f64 {
        1e-5
    }
    pub fn rk_tol() -> f64 {
        1e-3
    }
    pub fn stationary_eps_rel() -> f64 {
        1e-6
    }
    pub fn min_dt() -> f64 {
        1e-12
    }
    pub fn stability_cap() -> bool {
        true
    }
}

impl SolverConfig {
    pub fn new(t_end: f64) -> Self {
        Self {
            nodes: defaults::nodes(),
            delta: defaults::delta(),
            rk_tol: defaults::rk_tol(),
            dt_init: None,
            t_end,
            snapshot_dt: None,
            stationary_eps_rel: defaults::stationary_eps_rel(),
            min_dt: defaults::min_dt(),
            stability_cap: defaults::stability_cap(),
        }
    }

    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.nodes = nodes;
        self
    }

    pub fn initial_step(&self) -> f64 {
        self.dt_init.unwrap_or_else(|| {
            let h = 1.0 / self.nodes as f64;
            4.0 * h * h
        })
    }

    /// Snapshot cadence; a tenth of the horizon when absent.
    pub fn snapshot_interval(&self) -> f64 {
        self.snapshot_dt.unwrap_or(self.t_end / 10.0)
    }

    /// Copy with every optional field filled in.
    pub fn resolved(&self) -> Self {
        Self {
            dt_init: Some(self.initial_step()),
            snapshot_dt: Some(self.snapshot_interval()),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(FlowError::InvalidParameter(msg));
        if self.nodes < 3 {
            return fail(format!("solver requires nodes >= 3 (got {})", self.nodes));
        }
        if !(self.delta >= 0.0) {
            return fail(format!("solver requires delta >= 0 (got {})", self.delta));
        }
        if !(self.rk_tol > 0.0) {
            return fail(format!("solver requires rk_tol > 0 (got {})", self.rk_tol));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return fail(format!("solver requires t_end > 0 (got {})", self.t_end));
        }
        let dt = self.initial_step();
        if !(dt > 0.0) {
            return fail(format!("solver requires dt_init > 0 (got {dt})"));
        }
        let snap = self.snapshot_interval();
        if !(snap > 0.0) {
            return fail(format!("solver requires snapshot_dt > 0 (got {snap})"));
        }
        if !(self.stationary_eps_rel >= 0.0) {
            return fail(format!(
                "solver requires stationary_eps_rel >= 0 (got {})",
                self.stationary_eps_rel
            ));
        }
        if !(self.min_dt > 0.0 && self.min_dt <= dt) {
            return fail(format!(
                "solver requires 0 < min_dt <= dt_init (got min_dt = {}, dt_init = {dt})",
                self.min_dt
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve() {
        let c = SolverConfig::new(22.5).resolved();
        assert_eq!(c.nodes, 200);
        assert_eq!(c.delta, 1e-5);
        assert_eq!(c.rk_tol, 1e-3);
        assert_eq!(c.dt_init, Some(4.0 / 40000.0));
        assert_eq!(c.snapshot_dt, Some(2.25));
        c.validate().unwrap();
    }

    #[test]
    fn invalid_values_rejected() {
        assert!(SolverConfig::new(1.0).with_nodes(2).validate().is_err());
        assert!(SolverConfig::new(0.0).validate().is_err());
        let mut c = SolverConfig::new(1.0);
        c.rk_tol = 0.0;
        assert!(c.validate().is_err());
    }
}
