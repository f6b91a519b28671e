//! Surfaces in both representations.
//!
//! An [`ImplicitSurface`] is a zero level set `{f = 0}` and supplies `f`, its
//! gradient and its Hessian. A [`ParametricSurface`] is a doubly 1-periodic
//! immersion of the unit square and supplies the map, its 2×3 Jacobian
//! (row `j` holds `∂χ/∂Y_j`) and the three 2×2 component Hessians.

use std::fmt::Debug;

use nalgebra::{Matrix2, Matrix3, SMatrix};

use crate::error::{FlowError, Result};
use crate::geometry::{Vec2, Vec3};

mod bump;
mod fd;
mod klein;
mod sphere;
mod torus;

pub use bump::{bump, bump_derivatives, BumpSphere, BumpSurfaceParams};
pub use fd::{fd_gradient, fd_hessian, fd_hessian_extrapolated, fd_hessians, fd_jacobian, FD_HESSIAN_STEP, FD_JACOBIAN_STEP};
pub use klein::Klein;
pub use sphere::{Plane, Sphere};
pub use torus::{Torus, TorusParams};

/// 2×3 Jacobian of an immersion; row `j` is `∂χ/∂Y_j`.
pub type Jacobian = SMatrix<f64, 2, 3>;
/// Left pseudoinverse of `Jᵀ`, also 2×3.
pub type Pseudoinverse = SMatrix<f64, 2, 3>;

/// Default floor below which `det(J Jᵀ)` is treated as singular.
pub const METRIC_FLOOR: f64 = 1e-10;

/// Names accepted by the scenario catalog.
pub const CATALOG: [&str; 4] = ["torus", "klein", "bump_sphere", "sphere"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImplicitEval {
    pub value: f64,
    pub gradient: Vec3,
    pub hessian: Matrix3<f64>,
}

pub trait ImplicitSurface: Debug + Send + Sync {
    /// Value, gradient and Hessian at `x`.
    fn eval(&self, x: &Vec3) -> Result<ImplicitEval>;

    fn value(&self, x: &Vec3) -> Result<f64> {
        self.eval(x).map(|e| e.value)
    }

    fn gradient(&self, x: &Vec3) -> Result<Vec3> {
        self.eval(x).map(|e| e.gradient)
    }

    fn hessian(&self, x: &Vec3) -> Result<Matrix3<f64>> {
        self.eval(x).map(|e| e.hessian)
    }

    fn in_domain(&self, _x: &Vec3) -> bool {
        true
    }
}

pub trait ParametricSurface: Debug + Send + Sync {
    fn chi(&self, y: &Vec2) -> Vec3;

    fn jacobian(&self, y: &Vec2) -> Jacobian;

    /// `[∇²χ_1, ∇²χ_2, ∇²χ_3]`, each symmetric 2×2.
    fn hessians(&self, y: &Vec2) -> [Matrix2<f64>; 3];

    fn metric_determinant(&self, y: &Vec2) -> f64 {
        metric_determinant(&self.jacobian(y))
    }
}

pub fn metric_determinant(jac: &Jacobian) -> f64 {
    let g = jac * jac.transpose();
    g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)]
}

/// `(J Jᵀ)⁻¹ J`, the left Moore–Penrose inverse of `Jᵀ`, by explicit 2×2
/// inversion. Satisfies `M Jᵀ = I₂`.
pub fn pseudoinverse_of(jac: &Jacobian, floor: f64) -> Result<Pseudoinverse> {
    let g = jac * jac.transpose();
    let det = g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)];
    if !(det > floor) {
        return Err(FlowError::NearSingularMetric { det, node: None });
    }
    let inv = Matrix2::new(g[(1, 1)], -g[(0, 1)], -g[(1, 0)], g[(0, 0)]) / det;
    Ok(inv * jac)
}

pub fn pseudoinverse(surface: &dyn ParametricSurface, y: &Vec2) -> Result<Pseudoinverse> {
    pseudoinverse_of(&surface.jacobian(y), METRIC_FLOOR)
}
