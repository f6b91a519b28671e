//! Central finite-difference derivatives, used where closed forms are
//! impractical and as an independent check on the ones we do have.

use nalgebra::{Matrix2, Matrix3};

use super::Jacobian;
use crate::geometry::{Vec2, Vec3};

pub const FD_JACOBIAN_STEP: f64 = 1e-5;
/// Second differences lose `ε/h²` to cancellation, so they use a wider step.
pub const FD_HESSIAN_STEP: f64 = 1e-4;

pub fn fd_gradient<F: Fn(&Vec3) -> f64>(f: F, x: &Vec3, step: f64) -> Vec3 {
    Vec3::from_fn(|i, _| {
        let mut e = Vec3::zeros();
        e[i] = step;
        (f(&(x + e)) - f(&(x - e))) / (2.0 * step)
    })
}

/// Symmetrized central-difference Hessian of a scalar field.
pub fn fd_hessian<F: Fn(&Vec3) -> f64>(f: F, x: &Vec3, step: f64) -> Matrix3<f64> {
    let f0 = f(x);
    let unit = |i: usize| {
        let mut e = Vec3::zeros();
        e[i] = step;
        e
    };
    let h = Matrix3::from_fn(|i, j| {
        if i == j {
            let e = unit(i);
            (f(&(x + e)) - 2.0 * f0 + f(&(x - e))) / (step * step)
        } else {
            let (ei, ej) = (unit(i), unit(j));
            (f(&(x + ei + ej)) - f(&(x + ei - ej)) - f(&(x - ei + ej)) + f(&(x - ei - ej)))
                / (4.0 * step * step)
        }
    });
    (h + h.transpose()) * 0.5
}

/// Richardson extrapolation of [`fd_hessian`] from steps `step` and
/// `step / 2`, fourth-order accurate.
pub fn fd_hessian_extrapolated<F: Fn(&Vec3) -> f64>(f: F, x: &Vec3, step: f64) -> Matrix3<f64> {
    let coarse = fd_hessian(&f, x, step);
    let fine = fd_hessian(&f, x, 0.5 * step);
    (fine * 4.0 - coarse) / 3.0
}

/// Central-difference Jacobian of a map from the parameter square.
pub fn fd_jacobian<F: Fn(&Vec2) -> Vec3>(map: F, y: &Vec2, step: f64) -> Jacobian {
    let mut jac = Jacobian::zeros();
    for j in 0..2 {
        let mut e = Vec2::zeros();
        e[j] = step;
        let col = (map(&(y + e)) - map(&(y - e))) / (2.0 * step);
        jac.set_row(j, &col.transpose());
    }
    jac
}

/// Symmetrized central-difference Hessians of the three components.
pub fn fd_hessians<F: Fn(&Vec2) -> Vec3>(map: F, y: &Vec2, step: f64) -> [Matrix2<f64>; 3] {
    let e = [Vec2::new(step, 0.0), Vec2::new(0.0, step)];
    let c = map(y);
    let h2 = step * step;
    let d00 = (map(&(y + e[0])) - 2.0 * c + map(&(y - e[0]))) / h2;
    let d11 = (map(&(y + e[1])) - 2.0 * c + map(&(y - e[1]))) / h2;
    let d01 = (map(&(y + e[0] + e[1])) - map(&(y + e[0] - e[1])) - map(&(y - e[0] + e[1]))
        + map(&(y - e[0] - e[1])))
        / (4.0 * h2);
    [0, 1, 2].map(|k| Matrix2::new(d00[k], d01[k], d01[k], d11[k]))
}
