//! Velocity fields that keep a curve on its surface, and the analytic
//! diagnostics derived from them.
//!
//! For an implicit surface `{f = 0}` the constraint force is
//! `F = a (Tᵀ∇²f T + h(f)) / |∇f|² · ∇f`, always parallel to `∇f`. For an
//! immersion `χ` the parameter-space forcing is
//! `G = M(Y) [a ∂sYᵀ∇²χ ∂sY + F]` with `M` the left pseudoinverse of `∇χᵀ`.

use std::fmt;
use std::sync::Arc;

use crate::error::Result;
use crate::geometry::{Vec2, Vec3};
use crate::surface::{pseudoinverse_of, ImplicitSurface, ParametricSurface, METRIC_FLOOR};

type DiffusivityFn = dyn Fn(&Vec3, &Vec3) -> f64 + Send + Sync;

/// The coefficient `a(X, T) > 0` in front of `∂²X/∂s²`.
#[derive(Clone)]
pub enum Diffusivity {
    Constant(f64),
    Field(Arc<DiffusivityFn>),
}

impl Diffusivity {
    pub fn at(&self, x: &Vec3, t: &Vec3) -> f64 {
        match self {
            Diffusivity::Constant(a) => *a,
            Diffusivity::Field(f) => f(x, t),
        }
    }

    /// Multiply by a constant factor.
    pub fn scaled(&self, c: f64) -> Self {
        match self {
            Diffusivity::Constant(a) => Diffusivity::Constant(a * c),
            Diffusivity::Field(f) => {
                let f = f.clone();
                Diffusivity::Field(Arc::new(move |x, t| c * f(x, t)))
            }
        }
    }
}

impl fmt::Debug for Diffusivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diffusivity::Constant(a) => f.debug_tuple("Constant").field(a).finish(),
            Diffusivity::Field(_) => f.write_str("Field(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FlowParams {
    pub diffusivity: Diffusivity,
    /// `C` in the stabilizer `h(φ) = −C φ`.
    pub stabilizer_gain: f64,
}

impl Default for FlowParams {
    fn default() -> Self {
        Self {
            diffusivity: Diffusivity::Constant(1.0),
            stabilizer_gain: 1.0,
        }
    }
}

impl FlowParams {
    pub fn new(a: f64, stabilizer_gain: f64) -> Self {
        Self {
            diffusivity: Diffusivity::Constant(a),
            stabilizer_gain,
        }
    }

    pub fn stabilizer(&self, phi: f64) -> f64 {
        -self.stabilizer_gain * phi
    }
}

/// Constraint force at `x` for tangent `t`.
pub fn embedded_force(
    surface: &dyn ImplicitSurface,
    params: &FlowParams,
    x: &Vec3,
    t: &Vec3,
) -> Result<Vec3> {
    let e = surface.eval(x)?;
    let a = params.diffusivity.at(x, t);
    let q = t.dot(&(e.hessian * t));
    Ok(e.gradient * (a * (q + params.stabilizer(e.value)) / e.gradient.norm_squared()))
}

/// Parameter-space forcing `G(Y, ∂sY)`. `companion`, when given, is an
/// implicit description of the same surface whose constraint force is added
/// before projecting; without it `F = 0`.
pub fn immersed_rhs_force(
    surface: &dyn ParametricSurface,
    companion: Option<&dyn ImplicitSurface>,
    params: &FlowParams,
    y: &Vec2,
    dy_ds: &Vec2,
) -> Result<Vec2> {
    let jac = surface.jacobian(y);
    let hess = surface.hessians(y);
    immersed_force_with(&jac, &hess, surface.chi(y), companion, params, dy_ds)
}

pub(crate) fn immersed_force_with(
    jac: &crate::surface::Jacobian,
    hess: &[nalgebra::Matrix2<f64>; 3],
    x: Vec3,
    companion: Option<&dyn ImplicitSurface>,
    params: &FlowParams,
    dy_ds: &Vec2,
) -> Result<Vec2> {
    let t = jac.transpose() * dy_ds;
    let a = params.diffusivity.at(&x, &t);
    // curvature correction of a ∂s²X: ∂s²X = ∇χᵀ ∂s²Y + ∂sYᵀ∇²χ ∂sY
    let mut v = Vec3::from_fn(|k, _| a * dy_ds.dot(&(hess[k] * dy_ds)));
    if let Some(imp) = companion {
        v += embedded_force(imp, params, &x, &t)?;
    }
    Ok(pseudoinverse_of(jac, METRIC_FLOOR)? * v)
}

/// Normal speed `a κ (∇f·B)² / |∇f|²` of a curve lying on the surface.
pub fn surface_normal_velocity(
    surface: &dyn ImplicitSurface,
    params: &FlowParams,
    x: &Vec3,
    t: &Vec3,
    kappa: f64,
    b: &Vec3,
) -> Result<f64> {
    let g = surface.gradient(x)?;
    let a = params.diffusivity.at(x, t);
    Ok(a * kappa * g.dot(b).powi(2) / g.norm_squared())
}

/// Geodesic curvature `κ (∇f·B) / |∇f|`; the sign follows the orientation.
pub fn geodesic_curvature(surface: &dyn ImplicitSurface, x: &Vec3, kappa: f64, b: &Vec3) -> Result<f64> {
    let g = surface.gradient(x)?;
    Ok(kappa * g.dot(b) / g.norm())
}

/// `a κ² (∇f·B)² / |∇f|²`, the integrand of the length-decay identity.
pub fn length_decay_integrand(
    surface: &dyn ImplicitSurface,
    params: &FlowParams,
    x: &Vec3,
    t: &Vec3,
    kappa: f64,
    b: &Vec3,
) -> Result<f64> {
    Ok(kappa * surface_normal_velocity(surface, params, x, t, kappa, b)?)
}

/// Binormal speed `F·B`.
pub fn binormal_velocity(force: &Vec3, b: &Vec3) -> f64 {
    force.dot(b)
}
