use std::f64::consts::PI;

use nalgebra::Matrix2;

use super::fd::{fd_hessians, fd_jacobian, FD_HESSIAN_STEP, FD_JACOBIAN_STEP};
use super::{Jacobian, ParametricSurface};
use crate::geometry::{Vec2, Vec3};

/// Klein bottle immersed in 3-space as a plain doubly periodic map.
/// Derivatives come from central differences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Klein {
    pub jacobian_step: f64,
    pub hessian_step: f64,
}

impl Default for Klein {
    fn default() -> Self {
        Self {
            jacobian_step: FD_JACOBIAN_STEP,
            hessian_step: FD_HESSIAN_STEP,
        }
    }
}

impl ParametricSurface for Klein {
    fn chi(&self, y: &Vec2) -> Vec3 {
        let (su, cu) = (2.0 * PI * y.x).sin_cos();
        let (sv, cv) = (2.0 * PI * y.y).sin_cos();
        let cu2 = cu * cu;
        let cu3 = cu2 * cu;
        let cu4 = cu2 * cu2;
        let cu5 = cu4 * cu;
        let cu6 = cu4 * cu2;
        let cu7 = cu6 * cu;

        let x1 = -(2.0 / 15.0)
            * cu
            * (3.0 * cv - 30.0 * su + 90.0 * cu4 * su - 60.0 * cu6 * su + 5.0 * cu * cv * su);
        let x2 = -(1.0 / 15.0)
            * su
            * (3.0 * cv - 3.0 * cu2 * cv - 48.0 * cu4 * cv
                + 48.0 * cu6 * cv
                + 60.0 * su
                + 5.0 * cu * cv * su
                - 5.0 * cu3 * cv * su
                - 80.0 * cu5 * cv * su
                + 80.0 * cu7 * cv * su);
        let x3 = (2.0 / 15.0) * (3.0 + 5.0 * cu * su) * sv;
        Vec3::new(x1, x2, x3)
    }

    fn jacobian(&self, y: &Vec2) -> Jacobian {
        fd_jacobian(|p| self.chi(p), y, self.jacobian_step)
    }

    fn hessians(&self, y: &Vec2) -> [Matrix2<f64>; 3] {
        fd_hessians(|p| self.chi(p), y, self.hessian_step)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn third_component_vanishes_on_v0() {
        let k = Klein::default();
        for i in 0..50 {
            assert_eq!(k.chi(&Vec2::new(i as f64 / 50.0, 0.0)).z, 0.0);
        }
    }

    #[test]
    fn periodic_in_both_directions() {
        let k = Klein::default();
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        for _ in 0..100 {
            let y = Vec2::new(rng.gen(), rng.gen());
            assert!((k.chi(&(y + Vec2::new(1.0, 0.0))) - k.chi(&y)).amax() <= 1e-12);
            assert!((k.chi(&(y + Vec2::new(0.0, 1.0))) - k.chi(&y)).amax() <= 1e-12);
        }
    }

    #[test]
    fn metric_determinant_range() {
        let k = Klein::default();
        let n = 200;
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..n {
            for j in 0..n {
                let det = k.metric_determinant(&Vec2::new(i as f64 / n as f64, j as f64 / n as f64));
                lo = lo.min(det);
                hi = hi.max(det);
            }
        }
        assert!(lo > 0.0145 && hi < 32020.0, "range ({lo}, {hi})");
    }
}
