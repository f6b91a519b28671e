//! Semi-discrete right-hand sides of the flowing finite-volume scheme.

use crate::error::{FlowError, Result};
use crate::geometry::{frenet_data_of, next, prev, DiscreteCurve2, DiscreteCurve3, FrenetData, Vec2, Vec3};
use crate::kernels::{embedded_force, immersed_force_with, FlowParams};
use crate::redistribution::{alpha_discrete, RedistributionConfig};
use crate::surface::{metric_determinant, ImplicitSurface, ParametricSurface, METRIC_FLOOR};

/// Segments shorter than this fraction of the total length count as degenerate.
pub const DEGENERATE_RATIO: f64 = 1e-12;

/// Nodal velocities of an embedded curve together with the intermediate
/// quantities the diagnostics reuse.
#[derive(Debug, Clone)]
pub struct EmbeddedVelocity {
    pub velocity: Vec<Vec3>,
    pub alpha: Vec<f64>,
    /// `N·V` with `V` the velocity without the tangential term.
    pub vn: Vec<f64>,
    pub frenet: FrenetData,
}

#[derive(Debug, Clone)]
pub struct ImmersedVelocity {
    /// `dY/dt` in parameter space.
    pub velocity: Vec<Vec2>,
    /// `∇χᵀ dY/dt`, the induced velocity of the image curve.
    pub velocity3: Vec<Vec3>,
    pub alpha: Vec<f64>,
    pub vn: Vec<f64>,
    /// Frenet data of the image polygon `χ(Y_k)`.
    pub frenet: FrenetData,
    pub metric_det: Vec<f64>,
}

fn check_segments(d: &[f64], total: f64) -> Result<()> {
    match d.iter().position(|dk| *dk < DEGENERATE_RATIO * total) {
        Some(index) => Err(FlowError::DegenerateSegment { index }),
        None => Ok(()),
    }
}

fn tangential_speeds(fr: &FrenetData, vn: &[f64], redis: &RedistributionConfig) -> Result<Vec<f64>> {
    if redis.enabled {
        alpha_discrete(&fr.curvature, vn, &fr.d, fr.total_length, redis.omega)
    } else {
        Ok(vec![0.0; fr.len()])
    }
}

/// `dX_k/dt = a_k K_k + F_k + α_k T_k`, with the force evaluated at the unit
/// tangent.
pub fn rhs_embedded(
    curve: &DiscreteCurve3,
    surface: &dyn ImplicitSurface,
    flow: &FlowParams,
    redis: &RedistributionConfig,
    delta: f64,
) -> Result<EmbeddedVelocity> {
    embedded_velocity_of(curve.nodes(), surface, flow, redis, delta)
}

pub(crate) fn embedded_velocity_of(
    nodes: &[Vec3],
    surface: &dyn ImplicitSurface,
    flow: &FlowParams,
    redis: &RedistributionConfig,
    delta: f64,
) -> Result<EmbeddedVelocity> {
    let fr = frenet_data_of(nodes, delta)?;
    check_segments(&fr.d, fr.total_length)?;
    let m = nodes.len();
    let mut base = Vec::with_capacity(m);
    let mut vn = Vec::with_capacity(m);
    for (k, x) in nodes.iter().enumerate() {
        let t = fr.tangent[k].normalize();
        let a = flow.diffusivity.at(x, &t);
        let f = embedded_force(surface, flow, x, &t).map_err(|e| e.at_node(k))?;
        // grad f is orthogonal to T only on the exact surface; off it, the
        // tangential part herds nodes together and alpha does not undo it
        let f = f - t * t.dot(&f);
        let v = fr.curvature_vector[k] * a + f;
        vn.push(fr.normal[k].dot(&v));
        base.push(v);
    }
    let alpha = tangential_speeds(&fr, &vn, redis)?;
    let velocity = (0..m).map(|k| base[k] + fr.tangent[k] * alpha[k]).collect();
    Ok(EmbeddedVelocity {
        velocity,
        alpha,
        vn,
        frenet: fr,
    })
}

/// Parameter-space velocity of an immersed curve:
/// `dY_k/dt = a_k ∂s²Y_k + G_k + α_k (Y_{k+1} − Y_{k−1}) / (d_{k+1} + d_k)`,
/// where arc length and `d` are measured on the image `χ(Y)`.
pub fn rhs_immersed(
    curve: &DiscreteCurve2,
    surface: &dyn ParametricSurface,
    companion: Option<&dyn ImplicitSurface>,
    flow: &FlowParams,
    redis: &RedistributionConfig,
    delta: f64,
) -> Result<ImmersedVelocity> {
    let m = curve.len();
    if m < 3 {
        return Err(FlowError::TooFewNodes(m));
    }
    let y: Vec<Vec2> = (0..=m as isize).map(|k| curve.lifted(k)).collect();
    let y_prev = curve.lifted(-1);
    let x: Vec<Vec3> = (0..m).map(|k| surface.chi(&y[k])).collect();
    let fr = frenet_data_of(&x, delta)?;
    check_segments(&fr.d, fr.total_length)?;

    let jac: Vec<_> = (0..m).map(|k| surface.jacobian(&y[k])).collect();
    let mut metric_det = Vec::with_capacity(m);
    for (k, j) in jac.iter().enumerate() {
        let det = metric_determinant(j);
        if !(det > METRIC_FLOOR) {
            return Err(FlowError::NearSingularMetric { det, node: Some(k) });
        }
        metric_det.push(det);
    }

    // e_k = Y_k − Y_{k−1}, unit direction t_k and metric stretch q_k = |∇χᵀ t_k|
    let mut len_e = Vec::with_capacity(m);
    let mut dir = Vec::with_capacity(m);
    let mut stretch = Vec::with_capacity(m);
    for k in 0..m {
        let e = if k == 0 { y[0] - y_prev } else { y[k] - y[k - 1] };
        let n = e.norm();
        if !(n > 0.0) {
            return Err(FlowError::DegenerateSegment { index: k });
        }
        let t = e / n;
        len_e.push(n);
        dir.push(t);
        stretch.push((jac[k].transpose() * t).norm());
    }

    let mut base = Vec::with_capacity(m);
    let mut vn = Vec::with_capacity(m);
    for k in 0..m {
        let kn = next(k, m);
        let ds_y = dir[k] / stretch[k];
        let ds2_y = (dir[kn] / stretch[kn] - ds_y) * (2.0 / ((len_e[kn] + len_e[k]) * stretch[k]));
        let tangent3 = jac[k].transpose() * ds_y;
        let a = flow.diffusivity.at(&x[k], &tangent3);
        let g = immersed_force_with(&jac[k], &surface.hessians(&y[k]), x[k], companion, flow, &ds_y)
            .map_err(|e| e.at_node(k))?;
        let w = ds2_y * a + g;
        vn.push(fr.normal[k].dot(&(jac[k].transpose() * w)));
        base.push(w);
    }
    let alpha = tangential_speeds(&fr, &vn, redis)?;
    let mut velocity = Vec::with_capacity(m);
    let mut velocity3 = Vec::with_capacity(m);
    for k in 0..m {
        let kn = next(k, m);
        let before = if k == 0 { y_prev } else { y[prev(k, m)] };
        let chord = (y[k + 1] - before) / (fr.d[kn] + fr.d[k]);
        let w = base[k] + chord * alpha[k];
        velocity3.push(jac[k].transpose() * w);
        velocity.push(w);
    }
    Ok(ImmersedVelocity {
        velocity,
        velocity3,
        alpha,
        vn,
        frenet: fr,
        metric_det,
    })
}
