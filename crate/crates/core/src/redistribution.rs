//! Asymptotically uniform tangential redistribution.
//!
//! The tangential speed `α` solves
//! `∂sα = κvN − ⟨κvN⟩ + (L/|∂uX| − 1) ω`, integrated node by node along the
//! polygon and normalized to zero mean. With `ω = 0` relative segment
//! lengths are preserved; with `ω > 0` they relax towards `1/M`.

use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RedistributionConfig {
    #[serde(default = "default_omega")]
    pub omega: f64,
    #[serde(default = "default_enabled")]
    pub enabled: bool,
}

fn default_omega() -> f64 {
    10.0
}

fn default_enabled() -> bool {
    true
}

impl Default for RedistributionConfig {
    fn default() -> Self {
        Self {
            omega: default_omega(),
            enabled: default_enabled(),
        }
    }
}

impl RedistributionConfig {
    pub fn disabled() -> Self {
        Self {
            enabled: false,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega >= 0.0) {
            return Err(FlowError::InvalidParameter(format!(
                "redistribution requires omega >= 0 (got {})",
                self.omega
            )));
        }
        Ok(())
    }
}

/// `⟨κ vN⟩ = (1/L) Σ κ_k vN_k (d_{k+1} + d_k)/2`.
pub fn mean_curvature_velocity(kappa: &[f64], vn: &[f64], d: &[f64], total_length: f64) -> f64 {
    let m = d.len();
    let sum: f64 = (0..m)
        .map(|k| kappa[k] * vn[k] * 0.5 * (d[(k + 1) % m] + d[k]))
        .sum();
    sum / total_length
}

/// Nodal tangential speeds `α_k`.
///
/// Numbering follows the closed polygon with node `M` identified with node
/// `0`: `α_i = α_1 + Σ_{k=2..i} β_k` for `i = 2..M`, where
/// `β_k = κ_k vN_k d_k − ⟨κvN⟩ d_k + (L/M − d_k) ω`, and `α_1` is fixed by
/// `Σ_{i=1..M} α_i (d_{i+1} + d_i)/2 = 0`.
pub fn alpha_discrete(
    kappa: &[f64],
    vn: &[f64],
    d: &[f64],
    total_length: f64,
    omega: f64,
) -> Result<Vec<f64>> {
    let m = d.len();
    if let Some(index) = d.iter().position(|dk| !(*dk > 0.0)) {
        return Err(FlowError::DegenerateSegment { index });
    }
    let mean = mean_curvature_velocity(kappa, vn, d, total_length);
    let target = total_length / m as f64;
    let weight = |i: usize| 0.5 * (d[(i + 1) % m] + d[i % m]);

    // partial sums S_i, stored at array index i % M; S_1 = 0
    let mut partial = vec![0.0; m];
    let mut acc = 0.0;
    for i in 2..=m {
        let k = i % m;
        acc += kappa[k] * vn[k] * d[k] - mean * d[k] + (target - d[k]) * omega;
        partial[k] = acc;
    }
    let weighted: f64 = (2..=m).map(|i| weight(i) * partial[i % m]).sum();
    let total_weight: f64 = (1..=m).map(weight).sum();
    let alpha_1 = -weighted / total_weight;
    Ok(partial.into_iter().map(|s| alpha_1 + s).collect())
}

/// `|Σ α_k (d_{k+1} + d_k)/2| / (L max|α|)`, zero when `α ≡ 0`.
pub fn alpha_mean_residual(alpha: &[f64], d: &[f64]) -> f64 {
    let m = d.len();
    let total: f64 = d.iter().sum();
    let max = alpha.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    if max == 0.0 {
        return 0.0;
    }
    let s: f64 = (0..m).map(|k| alpha[k] * 0.5 * (d[(k + 1) % m] + d[k])).sum();
    s.abs() / (total * max)
}

/// `max_k |M d_k / L − 1|`.
pub fn dispersion(d: &[f64]) -> f64 {
    let m = d.len() as f64;
    let total: f64 = d.iter().sum();
    d.iter().fold(0.0, |acc, dk| acc.max((m * dk / total - 1.0).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    /// Direct replay of the recurrence in 1-based numbering (1..=M, with
    /// index M+1 ≡ 1), kept independent of the production loop.
    fn oracle(kappa: &[f64], vn: &[f64], d: &[f64], omega: f64) -> Vec<f64> {
        let m = d.len();
        // node i (1-based) ↔ array index i mod M
        let node = |v: &[f64], i: usize| v[i % m];
        let l: f64 = d.iter().sum();
        let mut mean = 0.0;
        for i in 1..=m {
            mean += node(kappa, i) * node(vn, i) * (node(d, i + 1) + node(d, i)) / 2.0;
        }
        mean /= l;
        let beta = |k: usize| {
            node(kappa, k) * node(vn, k) * node(d, k) - mean * node(d, k)
                + (l / m as f64 - node(d, k)) * omega
        };
        let s = |i: usize| (2..=i).map(beta).sum::<f64>();
        let w = |i: usize| (node(d, i + 1) + node(d, i)) / 2.0;
        let num: f64 = (2..=m).map(|i| w(i) * s(i)).sum();
        let den: f64 = (1..=m).map(w).sum();
        let a1 = -num / den;
        let mut out = vec![0.0; m];
        for i in 1..=m {
            out[i % m] = a1 + s(i);
        }
        out
    }

    fn random_data(m: usize, seed: u64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let kappa = (0..m).map(|_| rng.gen_range(0.1..3.0)).collect();
        let vn = (0..m).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let d = (0..m).map(|_| rng.gen_range(0.1..1.0)).collect();
        (kappa, vn, d)
    }

    #[test]
    fn mean_of_zero_and_constant() {
        let d = [0.3, 0.5, 0.2, 0.7];
        let l: f64 = d.iter().sum();
        assert_eq!(mean_curvature_velocity(&[1.0; 4], &[0.0; 4], &d, l), 0.0);
        let kappa = [2.0, 4.0, 1.0, 0.5];
        let vn = [1.5 / 2.0, 1.5 / 4.0, 1.5, 3.0];
        assert!((mean_curvature_velocity(&kappa, &vn, &d, l) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn mean_matches_brute_force() {
        let (kappa, vn, d) = random_data(7, 1);
        let l: f64 = d.iter().sum();
        let mut brute = 0.0;
        for k in 0..7 {
            let dn = if k == 6 { d[0] } else { d[k + 1] };
            brute += kappa[k] * vn[k] * (dn + d[k]) / 2.0;
        }
        assert!((mean_curvature_velocity(&kappa, &vn, &d, l) - brute / l).abs() <= 1e-14);
    }

    #[test]
    fn uniform_static_curve_needs_no_redistribution() {
        let d = vec![0.25; 8];
        let a = alpha_discrete(&[0.0; 8], &[0.0; 8], &d, 2.0, 10.0).unwrap();
        assert!(a.iter().all(|x| *x == 0.0));
        let a = alpha_discrete(&[2.0; 8], &[0.7; 8], &d, 2.0, 10.0).unwrap();
        assert!(a.iter().all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn matches_oracle_and_invariants() {
        let (kappa, vn, d) = random_data(5, 2);
        let l: f64 = d.iter().sum();
        let omega = 3.0;
        let a = alpha_discrete(&kappa, &vn, &d, l, omega).unwrap();
        let o = oracle(&kappa, &vn, &d, omega);
        for k in 0..5 {
            assert!((a[k] - o[k]).abs() <= 1e-13, "{k}: {} vs {}", a[k], o[k]);
        }
        let mean = mean_curvature_velocity(&kappa, &vn, &d, l);
        for i in 2..=5usize {
            let (k, kp) = (i % 5, i - 1);
            let beta = kappa[k] * vn[k] * d[k] - mean * d[k] + (l / 5.0 - d[k]) * omega;
            assert!((a[k] - a[kp] - beta).abs() <= 1e-13);
        }
        assert!(alpha_mean_residual(&a, &d) <= 1e-13);
    }

    #[test]
    fn degenerate_segment() {
        assert_eq!(
            alpha_discrete(&[1.0; 3], &[1.0; 3], &[1.0, 0.0, 1.0], 2.0, 1.0),
            Err(FlowError::DegenerateSegment { index: 1 })
        );
    }

    #[test]
    fn dispersion_of_uniform_is_zero() {
        assert_eq!(dispersion(&[0.5; 6]), 0.0);
        assert!((dispersion(&[1.0, 1.0, 2.0, 0.0 + 1.0]) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn omega_relaxes_frozen_circle() {
        // nodes slide along a fixed unit circle with speed α only
        fn run(omega: f64) -> f64 {
            use std::f64::consts::PI;
            let m = 40;
            let mut theta: Vec<f64> = (0..m)
                .map(|k| {
                    let u = k as f64 / m as f64;
                    2.0 * PI * (u + 0.08 * (2.0 * PI * u).sin())
                })
                .collect();
            let dt = 1e-3;
            for _ in 0..200 {
                let d: Vec<f64> = (0..m)
                    .map(|k| {
                        let prev = if k == 0 { theta[m - 1] - 2.0 * PI } else { theta[k - 1] };
                        2.0 * ((theta[k] - prev) / 2.0).sin()
                    })
                    .collect();
                let l: f64 = d.iter().sum();
                let a = alpha_discrete(&vec![0.0; m], &vec![0.0; m], &d, l, omega).unwrap();
                for k in 0..m {
                    theta[k] += dt * a[k];
                }
            }
            let d: Vec<f64> = (0..m)
                .map(|k| {
                    let prev = if k == 0 { theta[m - 1] - 2.0 * PI } else { theta[k - 1] };
                    2.0 * ((theta[k] - prev) / 2.0).sin()
                })
                .collect();
            dispersion(&d)
        }
        let (d0, d5, d20) = (run(0.0), run(5.0), run(20.0));
        assert!(d5 < d0 && d20 < d5, "{d0} {d5} {d20}");
        assert!(d20 < 0.1 * d0);
    }

    proptest! {
        #[test]
        fn zero_mean_and_shift_invariance(
            seed in 0u64..10_000,
            m in 3usize..40,
            c in -5.0f64..5.0,
            omega in 0.0f64..50.0,
        ) {
            let (kappa, vn, d) = random_data(m, seed);
            let l: f64 = d.iter().sum();
            let a = alpha_discrete(&kappa, &vn, &d, l, omega).unwrap();
            prop_assert!(alpha_mean_residual(&a, &d) <= 1e-12);
            // κvN + c: write it as κ·(vN + c/κ) where κ > 0
            let shifted: Vec<f64> = (0..m).map(|k| vn[k] + c / kappa[k]).collect();
            let b = alpha_discrete(&kappa, &shifted, &d, l, omega).unwrap();
            let scale = 1.0 + a.iter().fold(0.0f64, |x, y| x.max(y.abs()));
            for k in 0..m {
                prop_assert!((a[k] - b[k]).abs() <= 1e-12 * scale * (1.0 + c.abs()));
            }
        }
    }
}
