//! The two formulations behind a common interface over flat state vectors.

use std::sync::Arc;

use crate::error::Result;
use crate::geometry::{next, prev, DiscreteCurve2, FrenetData, Vec3};
use crate::kernels::{length_decay_integrand, FlowParams};
use crate::redistribution::{alpha_mean_residual, dispersion, mean_curvature_velocity, RedistributionConfig};
use crate::surface::{ImplicitSurface, ParametricSurface};

use super::rhs::{embedded_velocity_of, rhs_immersed};

/// Scalar summaries of one curve state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDiagnostics {
    pub length: f64,
    /// `max_k |f(X_k)|`; zero when no implicit description is available.
    pub max_f_abs: f64,
    /// `(Σ f(X_k)² (d_{k+1} + d_k)/2)^{1/2}`.
    pub phi_l2: f64,
    /// `⟨κ vN⟩`.
    pub mean_kv: f64,
    /// `max_k |M d_k / L − 1|`.
    pub dispersion: f64,
    /// Predicted `dL/dt` from the length-decay integrand.
    pub dl_dt_identity: f64,
    /// Smallest and largest metric determinant over the nodes (immersed only).
    pub metric_det: Option<(f64, f64)>,
}

/// Left end of the real stability interval of the Merson scheme, where
/// `|1 + z + z²/2 + z³/6 + z⁴/24 + z⁵/144| = 1`.
pub const MERSON_STABILITY_BOUND: f64 = 3.548;
const STABILITY_SAFETY: f64 = 0.8;

/// Largest step keeping the stiff diffusion part of the scheme stable.
///
/// Gershgorin bounds the spectrum of the discrete `a ∂s²` by
/// `max_k 4 a_k / (d_k d_{k+1})`.
pub fn stable_step_of(x: &[Vec3], flow: &FlowParams) -> f64 {
    let m = x.len();
    let mut lambda: f64 = 0.0;
    for k in 0..m {
        let (kp, kn) = (prev(k, m), next(k, m));
        let dk = (x[k] - x[kp]).norm();
        let dn = (x[kn] - x[k]).norm();
        let t = (x[kn] - x[kp]).normalize();
        lambda = lambda.max(4.0 * flow.diffusivity.at(&x[k], &t) / (dk * dn));
    }
    if lambda > 0.0 && lambda.is_finite() {
        STABILITY_SAFETY * MERSON_STABILITY_BOUND / lambda
    } else {
        f64::INFINITY
    }
}

/// A semi-discrete curve flow `dy/dt = rhs(y)` on a flattened state.
pub trait CurveFlow: Send + Sync {
    /// Writes `dy/dt` into `out` and returns the zero-mean residual of the
    /// tangential speeds used.
    fn rhs(&self, y: &[f64], out: &mut [f64]) -> Result<f64>;

    /// Nodes of the curve in 3-space.
    fn image(&self, y: &[f64]) -> Vec<Vec3>;

    /// Largest node speed in 3-space for the state derivative `dy`.
    fn max_speed(&self, y: &[f64], dy: &[f64]) -> f64;

    fn diagnostics(&self, y: &[f64]) -> Result<StateDiagnostics>;

    /// Explicit stability limit on the time step at state `y`.
    fn stable_step(&self, y: &[f64]) -> f64;
}

fn nodes3(y: &[f64]) -> Vec<Vec3> {
    y.chunks_exact(3).map(|c| Vec3::new(c[0], c[1], c[2])).collect()
}

fn implicit_summary(
    surface: &dyn ImplicitSurface,
    flow: &FlowParams,
    x: &[Vec3],
    fr: &FrenetData,
) -> Result<(f64, f64, f64)> {
    let mut max_f: f64 = 0.0;
    let mut phi2 = 0.0;
    let mut decay = 0.0;
    for (k, xk) in x.iter().enumerate() {
        let w = fr.dual_length(k);
        let f = surface.value(xk).map_err(|e| e.at_node(k))?;
        max_f = max_f.max(f.abs());
        phi2 += f * f * w;
        let t = fr.tangent[k].normalize();
        decay += w * length_decay_integrand(surface, flow, xk, &t, fr.curvature[k], &fr.binormal[k])
            .map_err(|e| e.at_node(k))?;
    }
    Ok((max_f, phi2.sqrt(), -decay))
}

#[derive(Debug, Clone)]
pub struct EmbeddedFlow {
    pub surface: Arc<dyn ImplicitSurface>,
    pub flow: FlowParams,
    pub redistribution: RedistributionConfig,
    pub delta: f64,
}

impl CurveFlow for EmbeddedFlow {
    fn rhs(&self, y: &[f64], out: &mut [f64]) -> Result<f64> {
        let x = nodes3(y);
        let v = embedded_velocity_of(&x, self.surface.as_ref(), &self.flow, &self.redistribution, self.delta)?;
        for (o, vk) in out.chunks_exact_mut(3).zip(&v.velocity) {
            o.copy_from_slice(vk.as_slice());
        }
        Ok(alpha_mean_residual(&v.alpha, &v.frenet.d))
    }

    fn image(&self, y: &[f64]) -> Vec<Vec3> {
        nodes3(y)
    }

    fn stable_step(&self, y: &[f64]) -> f64 {
        stable_step_of(&nodes3(y), &self.flow)
    }

    fn max_speed(&self, _y: &[f64], dy: &[f64]) -> f64 {
        nodes3(dy).iter().fold(0.0, |a, v| a.max(v.norm()))
    }

    fn diagnostics(&self, y: &[f64]) -> Result<StateDiagnostics> {
        let x = nodes3(y);
        let v = embedded_velocity_of(&x, self.surface.as_ref(), &self.flow, &self.redistribution, self.delta)?;
        let fr = &v.frenet;
        let (max_f_abs, phi_l2, dl_dt_identity) = implicit_summary(self.surface.as_ref(), &self.flow, &x, fr)?;
        Ok(StateDiagnostics {
            length: fr.total_length,
            max_f_abs,
            phi_l2,
            mean_kv: mean_curvature_velocity(&fr.curvature, &v.vn, &fr.d, fr.total_length),
            dispersion: dispersion(&fr.d),
            dl_dt_identity,
            metric_det: None,
        })
    }
}

#[derive(Debug, Clone)]
pub struct ImmersedFlow {
    pub surface: Arc<dyn ParametricSurface>,
    /// Implicit description of the same surface, adding its constraint force
    /// and enabling the `f`-based diagnostics.
    pub companion: Option<Arc<dyn ImplicitSurface>>,
    pub flow: FlowParams,
    pub redistribution: RedistributionConfig,
    pub delta: f64,
    pub winding: (i64, i64),
}

impl ImmersedFlow {
    fn curve(&self, y: &[f64]) -> DiscreteCurve2 {
        DiscreteCurve2::from_flat(y, self.winding)
    }
}

impl CurveFlow for ImmersedFlow {
    fn rhs(&self, y: &[f64], out: &mut [f64]) -> Result<f64> {
        let v = rhs_immersed(
            &self.curve(y),
            self.surface.as_ref(),
            self.companion.as_deref(),
            &self.flow,
            &self.redistribution,
            self.delta,
        )?;
        for (o, vk) in out.chunks_exact_mut(2).zip(&v.velocity) {
            o.copy_from_slice(vk.as_slice());
        }
        Ok(alpha_mean_residual(&v.alpha, &v.frenet.d))
    }

    fn image(&self, y: &[f64]) -> Vec<Vec3> {
        self.curve(y).nodes().iter().map(|p| self.surface.chi(p)).collect()
    }

    fn stable_step(&self, y: &[f64]) -> f64 {
        stable_step_of(&self.image(y), &self.flow)
    }

    fn max_speed(&self, y: &[f64], dy: &[f64]) -> f64 {
        let c = self.curve(y);
        c.nodes()
            .iter()
            .zip(dy.chunks_exact(2))
            .map(|(p, d)| {
                let j = self.surface.jacobian(p);
                (j.transpose() * crate::geometry::Vec2::new(d[0], d[1])).norm()
            })
            .fold(0.0, f64::max)
    }

    fn diagnostics(&self, y: &[f64]) -> Result<StateDiagnostics> {
        let c = self.curve(y);
        let v = rhs_immersed(
            &c,
            self.surface.as_ref(),
            self.companion.as_deref(),
            &self.flow,
            &self.redistribution,
            self.delta,
        )?;
        let fr = &v.frenet;
        let mean_kv = mean_curvature_velocity(&fr.curvature, &v.vn, &fr.d, fr.total_length);
        let (max_f_abs, phi_l2, dl_dt_identity) = match &self.companion {
            Some(imp) => implicit_summary(imp.as_ref(), &self.flow, &self.image(y), fr)?,
            None => (0.0, 0.0, -mean_kv * fr.total_length),
        };
        let lo = v.metric_det.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.metric_det.iter().copied().fold(0.0, f64::max);
        Ok(StateDiagnostics {
            length: fr.total_length,
            max_f_abs,
            phi_l2,
            mean_kv,
            dispersion: dispersion(&fr.d),
            dl_dt_identity,
            metric_det: Some((lo, hi)),
        })
    }
}
