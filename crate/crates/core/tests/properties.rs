//! Randomized invariants of the geometry, surfaces, kernels, redistribution
//! and snapshot plumbing.

use std::f64::consts::PI;

use proptest::prelude::*;

use curveflow::geometry::{frenet_data, DiscreteCurve3, Vec2, Vec3};
use curveflow::kernels::{embedded_force, length_decay_integrand, surface_normal_velocity, FlowParams};
use curveflow::redistribution::{alpha_discrete, alpha_mean_residual, mean_curvature_velocity};
use curveflow::scenario::{builtin, parse_config, read_snapshot, to_toml, write_snapshot};
use curveflow::surface::{
    pseudoinverse, BumpSphere, BumpSurfaceParams, ImplicitSurface, Klein, ParametricSurface, Sphere, Torus,
    TorusParams,
};

/// Star-shaped closed polygon with random radii and a random vertical wobble.
fn star_polygon(radii: &[f64], wobble: f64) -> DiscreteCurve3 {
    let m = radii.len();
    let nodes = radii
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let t = 2.0 * PI * k as f64 / m as f64;
            Vec3::new(r * t.cos(), r * t.sin(), wobble * (3.0 * t).sin())
        })
        .collect();
    DiscreteCurve3::new(nodes).unwrap()
}

fn torus() -> Torus {
    Torus::new(TorusParams::new(1.0, 4.0).unwrap())
}

/// A point on the torus and a unit tangent of the surface there.
fn torus_frame(u: f64, v: f64, angle: f64) -> (Vec3, Vec3) {
    let s = torus();
    let y = Vec2::new(u, v);
    let j = s.jacobian(&y);
    let e1 = j.row(0).transpose().normalize();
    let e2 = j.row(1).transpose();
    let e2 = (e2 - e1 * e1.dot(&e2)).normalize();
    (s.chi(&y), e1 * angle.cos() + e2 * angle.sin())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn frenet_invariants(
        radii in prop::collection::vec(0.5f64..2.0, 3..60),
        wobble in 0.0f64..0.5,
        delta in prop::sample::select(vec![0.0, 1e-5]),
    ) {
        let fr = frenet_data(&star_polygon(&radii, wobble), delta).unwrap();
        prop_assert_eq!(fr.total_length, fr.d.iter().sum::<f64>());
        prop_assert!(fr.total_length > 0.0);
        for k in 0..fr.len() {
            prop_assert!(fr.d[k] > 0.0);
            prop_assert!(fr.curvature[k] >= 0.0);
            if fr.curvature[k] > 1e-5 {
                prop_assert!(fr.binormal[k].norm() <= 1.0 + 4.0 * f64::EPSILON);
            }
        }
    }

    #[test]
    fn frenet_is_cyclically_equivariant(
        radii in prop::collection::vec(0.5f64..2.0, 3..40),
        wobble in 0.0f64..0.5,
        shift in 0usize..40,
    ) {
        let c = star_polygon(&radii, wobble);
        let m = c.len();
        let j = shift % m;
        let fr = frenet_data(&c, 1e-5).unwrap();
        let fs = frenet_data(&c.rotated(j), 1e-5).unwrap();
        for k in 0..m {
            let src = (k + j) % m;
            prop_assert_eq!(fs.d[k], fr.d[src]);
            prop_assert_eq!(fs.tangent[k], fr.tangent[src]);
            prop_assert_eq!(fs.curvature_vector[k], fr.curvature_vector[src]);
            prop_assert_eq!(fs.normal[k], fr.normal[src]);
            prop_assert_eq!(fs.binormal[k], fr.binormal[src]);
        }
    }

    #[test]
    fn torus_representations_agree(u in 0.0f64..1.0, v in 0.0f64..1.0) {
        let s = torus();
        let y = Vec2::new(u, v);
        prop_assert!(s.value(&s.chi(&y)).unwrap().abs() <= 1e-10);
        let bound = 16.0 * PI.powi(4) * 1.0 * 3.0f64.powi(2);
        prop_assert!(s.metric_determinant(&y) >= bound * (1.0 - 1e-12));
    }

    #[test]
    fn pseudoinverse_is_a_left_inverse(u in -2.0f64..2.0, v in -2.0f64..2.0, klein in any::<bool>()) {
        let y = Vec2::new(u, v);
        let surface: Box<dyn ParametricSurface> = if klein { Box::new(Klein::default()) } else { Box::new(torus()) };
        if let Ok(m) = pseudoinverse(surface.as_ref(), &y) {
            let err = (m * surface.jacobian(&y).transpose() - nalgebra::Matrix2::identity()).abs().max();
            prop_assert!(err <= 1e-10, "{}", err);
        }
    }

    #[test]
    fn torus_force_has_no_tangential_part(
        u in 0.0f64..1.0,
        v in 0.0f64..1.0,
        angle in 0.0f64..(2.0 * PI),
        c in 0.0f64..5.0,
    ) {
        let (x, t) = torus_frame(u, v, angle);
        let f = embedded_force(&torus(), &FlowParams::new(1.0, c), &x, &t).unwrap();
        prop_assert!(f.dot(&t).abs() <= 1e-12 * f.norm().max(f64::MIN_POSITIVE));
    }

    #[test]
    fn normal_decomposition_of_the_gradient(
        u in 0.0f64..1.0,
        v in 0.0f64..1.0,
        angle in 0.0f64..(2.0 * PI),
        turn in 0.0f64..(2.0 * PI),
    ) {
        // any unit N ⊥ T completes an orthonormal frame with B = T × N
        let (x, t) = torus_frame(u, v, angle);
        let p = t.cross(&Vec3::new(0.3, -0.7, 0.6)).normalize();
        let n = p * turn.cos() + t.cross(&p) * turn.sin();
        let b = t.cross(&n);
        let g = torus().gradient(&x).unwrap();
        let lhs = g.norm_squared();
        prop_assert!((lhs - g.dot(&n).powi(2) - g.dot(&b).powi(2)).abs() <= 1e-8 * lhs);
    }

    #[test]
    fn decay_integrand_is_nonnegative_and_scales_with_a(
        x in prop::array::uniform3(-3.0f64..3.0),
        t in prop::array::uniform3(-1.0f64..1.0),
        b in prop::array::uniform3(-1.0f64..1.0),
        kappa in 0.0f64..10.0,
        a in 0.01f64..10.0,
        bump in any::<bool>(),
    ) {
        let x = Vec3::from(x) + Vec3::new(0.0, 0.0, 0.1);
        let (t, b) = (Vec3::from(t), Vec3::from(b));
        let surface: Box<dyn ImplicitSurface> = if bump {
            Box::new(BumpSphere::new(BumpSurfaceParams::new(2.5, 4.0, 3.0).unwrap()))
        } else {
            Box::new(Sphere::new(1.5).unwrap())
        };
        let one = FlowParams::new(1.0, 1.0);
        let scaled = FlowParams::new(a, 1.0);
        let w = length_decay_integrand(surface.as_ref(), &one, &x, &t, kappa, &b).unwrap();
        let ws = length_decay_integrand(surface.as_ref(), &scaled, &x, &t, kappa, &b).unwrap();
        let vn = surface_normal_velocity(surface.as_ref(), &one, &x, &t, kappa, &b).unwrap();
        let vns = surface_normal_velocity(surface.as_ref(), &scaled, &x, &t, kappa, &b).unwrap();
        prop_assert!(w >= 0.0);
        prop_assert!((ws - a * w).abs() <= 1e-12 * (ws.abs() + a * w.abs()));
        prop_assert!((vns - a * vn).abs() <= 1e-12 * (vns.abs() + a * vn.abs()));
    }

    #[test]
    fn alpha_telescopes(
        d in prop::collection::vec(0.01f64..1.0, 3..50),
        seed in prop::collection::vec((0.0f64..5.0, -3.0f64..3.0), 50),
        omega in 0.0f64..100.0,
    ) {
        let m = d.len();
        let (kappa, vn): (Vec<f64>, Vec<f64>) = seed[..m].iter().copied().unzip();
        let l: f64 = d.iter().sum();
        let alpha = alpha_discrete(&kappa, &vn, &d, l, omega).unwrap();
        let scale = 1.0 + alpha.iter().fold(0.0f64, |x, y| x.max(y.abs()));
        prop_assert!(alpha_mean_residual(&alpha, &d) <= 1e-12 * l * scale);
        let mean = mean_curvature_velocity(&kappa, &vn, &d, l);
        // node M is node 0; the bracket for i -> i+1 uses index (i+1) mod M
        for i in 1..m {
            let k = (i + 1) % m;
            let bracket = kappa[k] * vn[k] * d[k] - mean * d[k] + (l / m as f64 - d[k]) * omega;
            let step = alpha[k] - alpha[i];
            prop_assert!((step - bracket).abs() <= 1e-12 * scale * (1.0 + omega));
        }
    }

    #[test]
    fn snapshot_round_trip_is_bitwise(
        coords in prop::collection::vec(-1e6f64..1e6, 9..90),
        planar in any::<bool>(),
    ) {
        let dim = if planar { 2 } else { 3 };
        let state = &coords[..coords.len() / dim * dim];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("snap.csv");
        write_snapshot(&path, state, dim).unwrap();
        let (back, back_dim) = read_snapshot(&path).unwrap();
        prop_assert_eq!(back_dim, dim);
        prop_assert_eq!(back.len(), state.len());
        for (a, b) in back.iter().zip(state) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn config_round_trips_with_overridden_values(
        r in 0.1f64..3.0,
        gap in 0.1f64..5.0,
        omega in 0.0f64..100.0,
        gain in 0.0f64..10.0,
        nodes in 3usize..1000,
    ) {
        let mut cfg = builtin("torus_knot_2_3").unwrap();
        if let curveflow::scenario::SurfaceConfig::Torus { tube_radius, center_radius } = &mut cfg.surface {
            *tube_radius = r;
            *center_radius = r + gap;
        }
        cfg.redistribution.omega = omega;
        cfg.flow.stabilizer_gain = gain;
        cfg.solver.nodes = nodes;
        let text = to_toml(&cfg).unwrap();
        prop_assert_eq!(parse_config(&text).unwrap(), cfg);
    }
}
