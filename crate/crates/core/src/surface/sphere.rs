use nalgebra::Matrix3;

use super::{ImplicitEval, ImplicitSurface};
use crate::error::{FlowError, Result};
use crate::geometry::Vec3;

/// `|X|² − R²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sphere {
    pub radius: f64,
}

impl Sphere {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(FlowError::InvalidParameter(format!(
                "sphere requires radius > 0 (got {radius})"
            )));
        }
        Ok(Self { radius })
    }

    pub fn upper_height(&self, x1: f64, x2: f64) -> Option<f64> {
        let rem = self.radius * self.radius - x1 * x1 - x2 * x2;
        (rem >= 0.0).then(|| rem.sqrt())
    }
}

impl ImplicitSurface for Sphere {
    fn eval(&self, x: &Vec3) -> Result<ImplicitEval> {
        Ok(ImplicitEval {
            value: x.norm_squared() - self.radius * self.radius,
            gradient: 2.0 * x,
            hessian: 2.0 * Matrix3::identity(),
        })
    }
}

/// The plane `X3 = 0`, written as `f = X3`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Plane;

impl ImplicitSurface for Plane {
    fn eval(&self, x: &Vec3) -> Result<ImplicitEval> {
        Ok(ImplicitEval {
            value: x.z,
            gradient: Vec3::z(),
            hessian: Matrix3::zeros(),
        })
    }
}
