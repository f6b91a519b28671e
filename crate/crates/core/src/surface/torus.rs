use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix3};

use super::{ImplicitEval, ImplicitSurface, Jacobian, ParametricSurface};
use crate::error::{FlowError, Result};
use crate::geometry::{Vec2, Vec3};

/// Tube radius `r` and center-circle radius `R`, `0 < r < R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusParams {
    pub tube_radius: f64,
    pub center_radius: f64,
}

impl TorusParams {
    pub fn new(tube_radius: f64, center_radius: f64) -> Result<Self> {
        if !(tube_radius > 0.0 && tube_radius < center_radius) {
            return Err(FlowError::InvalidParameter(format!(
                "torus requires 0 < r < R (got r = {tube_radius}, R = {center_radius})"
            )));
        }
        Ok(Self {
            tube_radius,
            center_radius,
        })
    }
}

/// Torus of revolution about the `X3` axis. Implements both the implicit
/// form `((X1² + X2²)^½ − R)² + X3² − r²` and the immersion
/// `((r cos 2πv + R) sin 2πu, (r cos 2πv + R) cos 2πu, r sin 2πv)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Torus {
    params: TorusParams,
}

impl Torus {
    pub fn new(params: TorusParams) -> Self {
        Self { params }
    }

    pub fn params(&self) -> TorusParams {
        self.params
    }

    /// Closed-form `16π⁴ r² (R + r cos 2πv)²`.
    pub fn metric_determinant_exact(&self, v: f64) -> f64 {
        let TorusParams {
            tube_radius: r,
            center_radius: big_r,
        } = self.params;
        let p = big_r + r * (2.0 * PI * v).cos();
        16.0 * PI.powi(4) * r * r * p * p
    }
}

impl ImplicitSurface for Torus {
    fn eval(&self, x: &Vec3) -> Result<ImplicitEval> {
        let TorusParams {
            tube_radius: r,
            center_radius: big_r,
        } = self.params;
        let rho2 = x.x * x.x + x.y * x.y;
        if !(rho2 > 0.0) {
            return Err(FlowError::OutsideRegularityDomain { node: None });
        }
        let rho = rho2.sqrt();
        let value = (rho - big_r).powi(2) + x.z * x.z - r * r;
        let gradient = 2.0 * x - 2.0 * big_r * Vec3::new(x.x / rho, x.y / rho, 0.0);
        let w = Vec3::new(x.y, -x.x, 0.0);
        let hessian = 2.0 * Matrix3::identity() - (w * w.transpose()) * (2.0 * big_r / (rho2 * rho));
        Ok(ImplicitEval {
            value,
            gradient,
            hessian,
        })
    }

    fn in_domain(&self, x: &Vec3) -> bool {
        x.x * x.x + x.y * x.y > 0.0
    }
}

impl ParametricSurface for Torus {
    fn chi(&self, y: &Vec2) -> Vec3 {
        let TorusParams {
            tube_radius: r,
            center_radius: big_r,
        } = self.params;
        let (sa, ca) = (2.0 * PI * y.x).sin_cos();
        let (sb, cb) = (2.0 * PI * y.y).sin_cos();
        let p = r * cb + big_r;
        Vec3::new(p * sa, p * ca, r * sb)
    }

    fn jacobian(&self, y: &Vec2) -> Jacobian {
        let TorusParams {
            tube_radius: r,
            center_radius: big_r,
        } = self.params;
        let (sa, ca) = (2.0 * PI * y.x).sin_cos();
        let (sb, cb) = (2.0 * PI * y.y).sin_cos();
        let p = r * cb + big_r;
        let tp = 2.0 * PI;
        Jacobian::new(
            tp * p * ca,
            -tp * p * sa,
            0.0,
            -tp * r * sb * sa,
            -tp * r * sb * ca,
            tp * r * cb,
        )
    }

    fn hessians(&self, y: &Vec2) -> [Matrix2<f64>; 3] {
        let TorusParams {
            tube_radius: r,
            center_radius: big_r,
        } = self.params;
        let (sa, ca) = (2.0 * PI * y.x).sin_cos();
        let (sb, cb) = (2.0 * PI * y.y).sin_cos();
        let p = r * cb + big_r;
        let k = 4.0 * PI * PI;
        [
            Matrix2::new(-k * p * sa, -k * r * sb * ca, -k * r * sb * ca, -k * r * cb * sa),
            Matrix2::new(-k * p * ca, k * r * sb * sa, k * r * sb * sa, -k * r * cb * ca),
            Matrix2::new(0.0, 0.0, 0.0, -k * r * sb),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    fn torus() -> Torus {
        Torus::new(TorusParams::new(1.0, 4.0).unwrap())
    }

    #[test]
    fn params_validated() {
        assert!(TorusParams::new(4.0, 1.0).is_err());
        assert!(TorusParams::new(0.0, 1.0).is_err());
        assert!(TorusParams::new(1.0, 1.0).is_err());
    }

    #[test]
    fn known_points() {
        let t = torus();
        assert_eq!(t.value(&Vec3::new(5.0, 0.0, 0.0)).unwrap(), 0.0);
        assert_eq!(t.value(&Vec3::new(4.0, 0.0, 1.0)).unwrap(), 0.0);
        assert_eq!(t.value(&Vec3::new(4.0, 0.0, 0.0)).unwrap(), -1.0);
        assert_eq!(
            t.value(&Vec3::new(0.0, 0.0, 1.0)),
            Err(FlowError::OutsideRegularityDomain { node: None })
        );
        assert_relative_eq!(t.chi(&Vec2::new(0.0, 0.0)), Vec3::new(0.0, 5.0, 0.0));
    }

    #[test]
    fn hessian_is_symmetric() {
        let h = torus().hessian(&Vec3::new(1.3, -3.1, 0.4)).unwrap();
        assert_eq!(h, h.transpose());
    }

    #[test]
    fn gradient_norm_closed_form() {
        let t = torus();
        let x = Vec3::new(2.0, 3.5, -0.6);
        let g = t.gradient(&x).unwrap();
        let rho = (x.x * x.x + x.y * x.y).sqrt();
        let closed = 2.0 * (x.norm_squared() - 8.0 * rho + 16.0).sqrt();
        assert_relative_eq!(g.norm(), closed, max_relative = 1e-14);
        let tv = Vec3::new(0.3, -0.2, 0.9);
        let q = tv.dot(&(t.hessian(&x).unwrap() * tv));
        let closed_q = 2.0 * tv.norm_squared() - 8.0 / rho.powi(3) * (tv.x * x.y - tv.y * x.x).powi(2);
        assert_relative_eq!(q, closed_q, max_relative = 1e-13);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let t = torus();
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for _ in 0..100 {
            let y = Vec2::new(rng.gen(), rng.gen());
            let x = t.chi(&y) + Vec3::from_fn(|_, _| rng.gen_range(-0.2..0.2));
            let e = t.eval(&x).unwrap();
            let f = |p: &Vec3| t.value(p).unwrap();
            assert!((e.gradient - fd_gradient(f, &x, FD_JACOBIAN_STEP)).amax() <= 1e-6);
            assert!((e.hessian - fd_hessian(f, &x, FD_HESSIAN_STEP)).amax() <= 1e-6);

            let map = |p: &Vec2| t.chi(p);
            assert!((t.jacobian(&y) - fd_jacobian(map, &y, FD_JACOBIAN_STEP)).amax() <= 1e-6);
            let (ha, hf) = (t.hessians(&y), fd_hessians(map, &y, FD_HESSIAN_STEP));
            for k in 0..3 {
                assert!((ha[k] - hf[k]).amax() <= 1e-4 * (1.0 + ha[k].amax()));
            }
        }
    }

    #[test]
    fn implicit_and_parametric_agree() {
        let t = torus();
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        for _ in 0..1000 {
            let y = Vec2::new(rng.gen(), rng.gen());
            assert!(t.value(&t.chi(&y)).unwrap().abs() <= 1e-10);
            let det = t.metric_determinant(&y);
            assert_relative_eq!(det, t.metric_determinant_exact(y.y), max_relative = 1e-12);
            assert!(det >= 16.0 * PI.powi(4) * 9.0 * (1.0 - 1e-12));
        }
    }

    #[test]
    fn metric_determinant_value() {
        let det = torus().metric_determinant(&Vec2::new(0.3, 0.0));
        assert_relative_eq!(det, 25.0 * 16.0 * PI.powi(4), max_relative = 1e-13);
        assert!((det - 38963.6).abs() < 0.1);
    }

    #[test]
    fn periodic() {
        let t = torus();
        let y = Vec2::new(0.37, 0.81);
        let shifted = t.chi(&(y + Vec2::new(2.0, -1.0)));
        assert!((shifted - t.chi(&y)).amax() < 1e-13);
    }
}
