use std::f64::consts::LN_2;

use nalgebra::Matrix3;

use super::{ImplicitEval, ImplicitSurface};
use crate::error::{FlowError, Result};
use crate::geometry::Vec3;

/// Inside `ρ² < 1 − BUMP_CUTOFF` the closed form is used; outside, exact zeros.
const BUMP_CUTOFF: f64 = 1e-8;

/// Base radius `r`, vertical stiffness `c` and bump height `v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpSurfaceParams {
    pub radius: f64,
    pub stiffness: f64,
    pub height: f64,
}

impl BumpSurfaceParams {
    pub fn new(radius: f64, stiffness: f64, height: f64) -> Result<Self> {
        if !(radius > 0.0 && stiffness > 0.0 && height >= 0.0) {
            return Err(FlowError::InvalidParameter(format!(
                "bump surface requires r > 0, c > 0, v >= 0 (got r = {radius}, c = {stiffness}, v = {height})"
            )));
        }
        Ok(Self {
            radius,
            stiffness,
            height,
        })
    }
}

/// `v · 2^{−1/(1 − x² − y²)}` on the open unit disc, zero elsewhere.
pub fn bump(x: f64, y: f64, height: f64) -> f64 {
    bump_derivatives(x, y, height).0
}

/// Value, gradient `[b_x, b_y]` and Hessian `[[b_xx, b_xy], [b_xy, b_yy]]`.
pub fn bump_derivatives(x: f64, y: f64, height: f64) -> (f64, [f64; 2], [[f64; 2]; 2]) {
    let s = 1.0 - x * x - y * y;
    if s <= BUMP_CUTOFF {
        return (0.0, [0.0; 2], [[0.0; 2]; 2]);
    }
    // b = v e^g with g = −ln2 / s
    let b = height * (-LN_2 / s).exp();
    let s2 = s * s;
    let s3 = s2 * s;
    let gx = -2.0 * LN_2 * x / s2;
    let gy = -2.0 * LN_2 * y / s2;
    let gxx = -2.0 * LN_2 * (1.0 / s2 + 4.0 * x * x / s3);
    let gyy = -2.0 * LN_2 * (1.0 / s2 + 4.0 * y * y / s3);
    let gxy = -8.0 * LN_2 * x * y / s3;
    let bxy = b * (gx * gy + gxy);
    (
        b,
        [b * gx, b * gy],
        [[b * (gx * gx + gxx), bxy], [bxy, b * (gy * gy + gyy)]],
    )
}

/// Genus-0 surface with two humps:
/// `X1² + X2² + c²(X3 − φ(X1, X2))² − r²`, `φ = bump(X1 − 1, X2) + bump(X1 + 1, X2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpSphere {
    params: BumpSurfaceParams,
}

impl BumpSphere {
    pub fn new(params: BumpSurfaceParams) -> Self {
        Self { params }
    }

    pub fn params(&self) -> BumpSurfaceParams {
        self.params
    }

    fn phi(&self, x1: f64, x2: f64) -> (f64, [f64; 2], [[f64; 2]; 2]) {
        let v = self.params.height;
        let (a, ga, ha) = bump_derivatives(x1 - 1.0, x2, v);
        let (b, gb, hb) = bump_derivatives(x1 + 1.0, x2, v);
        (
            a + b,
            [ga[0] + gb[0], ga[1] + gb[1]],
            [
                [ha[0][0] + hb[0][0], ha[0][1] + hb[0][1]],
                [ha[1][0] + hb[1][0], ha[1][1] + hb[1][1]],
            ],
        )
    }

    /// `φ(x1, x2)`, the vertical shift added by the two humps.
    pub fn bump_offset(&self, x1: f64, x2: f64) -> f64 {
        self.phi(x1, x2).0
    }

    /// Height of the upper sheet above `(x1, x2)`, if the point projects onto it.
    pub fn upper_height(&self, x1: f64, x2: f64) -> Option<f64> {
        let BumpSurfaceParams {
            radius: r,
            stiffness: c,
            ..
        } = self.params;
        let rem = r * r - x1 * x1 - x2 * x2;
        (rem >= 0.0).then(|| rem.sqrt() / c + self.phi(x1, x2).0)
    }
}

impl ImplicitSurface for BumpSphere {
    fn eval(&self, x: &Vec3) -> Result<ImplicitEval> {
        let BumpSurfaceParams {
            radius: r,
            stiffness: c,
            ..
        } = self.params;
        let (phi, gp, hp) = self.phi(x.x, x.y);
        let c2 = c * c;
        let w = x.z - phi;
        let value = x.x * x.x + x.y * x.y + c2 * w * w - r * r;
        let gradient = Vec3::new(
            2.0 * x.x - 2.0 * c2 * w * gp[0],
            2.0 * x.y - 2.0 * c2 * w * gp[1],
            2.0 * c2 * w,
        );
        let h11 = 2.0 + 2.0 * c2 * (gp[0] * gp[0] - w * hp[0][0]);
        let h22 = 2.0 + 2.0 * c2 * (gp[1] * gp[1] - w * hp[1][1]);
        let h12 = 2.0 * c2 * (gp[0] * gp[1] - w * hp[0][1]);
        let h13 = -2.0 * c2 * gp[0];
        let h23 = -2.0 * c2 * gp[1];
        let hessian = Matrix3::new(h11, h12, h13, h12, h22, h23, h13, h23, 2.0 * c2);
        Ok(ImplicitEval {
            value,
            gradient,
            hessian,
        })
    }
}
