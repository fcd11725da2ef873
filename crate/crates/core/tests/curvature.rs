use std::f64::consts::PI;

use collar_glue::curvature::*;
use collar_glue::metric::*;
use collar_glue::scalar::{ScalarFn, SmoothFn};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn axis(n: usize, i: usize) -> DVector<f64> {
    DVector::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 })
}

fn round_sphere_chart(n: usize) -> CollarMetric {
    CollarMetric::warped_product(ScalarFn::sin(1.0, 0.0), n, (0.1, PI - 0.1)).unwrap()
}

fn flat_torus() -> CollarMetric {
    CollarMetric::diagonal_torus(vec![ScalarFn::constant(1.0); 3], (-0.5, 0.5)).unwrap()
}

fn cylinder() -> CollarMetric {
    CollarMetric::warped_product(ScalarFn::constant(1.0), 4, (-0.5, 0.5)).unwrap()
}

fn generic_warp() -> ScalarFn {
    ScalarFn::Sum {
        terms: vec![ScalarFn::cosh(0.8, 0.3), ScalarFn::polynomial(vec![0.2, -0.1, 0.05])],
    }
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0))
}

#[test]
fn flat_torus_christoffels_vanish() {
    let c = flat_torus();
    let gamma = christoffel(&c.chart(), &Point::new(vec![0.2, 0.4, 0.9], 0.1)).unwrap();
    for a in 0..4 {
        for b in 0..4 {
            for d in 0..4 {
                assert!(gamma.get(d, a, b).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn warped_collar_normal_christoffels_match_fd_oracle() {
    let phi = generic_warp();
    let c = CollarMetric::warped_product(phi.clone(), 4, (-0.5, 0.5)).unwrap();
    let p = Point::new(vec![0.9, 1.4, 0.3], 0.17);
    let exact = christoffel(&c.chart(), &p).unwrap();
    let fd = christoffel(&FdChart::new(c.chart(), FiniteDifference::default()), &p).unwrap();
    let sigma = c.section().sigma(&p.x);
    let (f, df) = (phi.value(p.t), phi.deriv(p.t, 1));
    for j in 0..3 {
        let closed = -f * df * sigma[(j, j)];
        assert!((exact.get(3, j, j) - closed).abs() < 1e-13);
        assert!((fd.get(3, j, j) - closed).abs() < 1e-8);
    }
    for a in 0..4 {
        for b in 0..4 {
            for d in 0..4 {
                assert!((exact.get(d, a, b) - exact.get(d, b, a)).abs() < 1e-15);
                assert!((exact.get(d, a, b) - fd.get(d, a, b)).abs() < 1e-8);
            }
        }
    }
}

#[test]
fn round_sphere_christoffels_match_closed_form() {
    // S^3 as dt^2 + sin^2 t (dth^2 + sin^2 th dph^2); coordinates (th, ph, t).
    let c = CollarMetric::warped_product(ScalarFn::sin(1.0, 0.0), 3, (0.1, PI - 0.1)).unwrap();
    let (th, t) = (1.1, 0.7);
    let gamma = christoffel(&c.chart(), &Point::new(vec![th, 0.4], t)).unwrap();
    let cot = |a: f64| a.cos() / a.sin();
    let expected = [
        ((2, 0, 0), -t.sin() * t.cos()),
        ((2, 1, 1), -t.sin() * t.cos() * th.sin().powi(2)),
        ((0, 0, 2), cot(t)),
        ((1, 1, 2), cot(t)),
        ((0, 1, 1), -th.sin() * th.cos()),
        ((1, 0, 1), cot(th)),
    ];
    for ((c_, a, b), v) in expected {
        assert!((gamma.get(c_, a, b) - v).abs() < 1e-12, "Gamma^{c_}_{a}{b}");
    }
    let fd = christoffel(&FdChart::new(c.chart(), FiniteDifference::default()), &Point::new(vec![th, 0.4], t)).unwrap();
    for ((c_, a, b), v) in expected {
        assert!((fd.get(c_, a, b) - v).abs() < 1e-8);
    }
}

#[test]
fn sectional_curvature_model_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let sphere = round_sphere_chart(4);
    let torus = flat_torus();
    for _ in 0..20 {
        let u = random_vec(&mut rng, 4);
        let v = random_vec(&mut rng, 4);
        let p = Point::new(vec![rng.gen_range(0.2..2.9), rng.gen_range(0.2..2.9), rng.gen_range(0.0..6.0)], rng.gen_range(0.2..2.9));
        assert!((sectional(&sphere.chart(), &p, &u, &v).unwrap() - 1.0).abs() < 1e-6);
        let q = Point::new(vec![0.3, 0.5, 0.7], 0.1);
        assert!(sectional(&torus.chart(), &q, &u, &v).unwrap().abs() < 1e-9);
    }
    assert!(matches!(
        sectional(&sphere.chart(), &Point::new(vec![1.0, 1.0, 1.0], 1.0), &axis(4, 0), &(axis(4, 0) * 2.0)),
        Err(collar_glue::GlueError::DegeneratePlane { .. })
    ));
}

#[test]
fn warped_sectional_closed_forms_and_fd_order() {
    let phi = generic_warp();
    let c = CollarMetric::warped_product(phi.clone(), 4, (-0.5, 0.5)).unwrap();
    let p = Point::new(vec![1.0, 1.3, 2.0], 0.12);
    let (f, df, ddf) = (phi.value(p.t), phi.deriv(p.t, 1), phi.deriv(p.t, 2));
    let radial = -ddf / f;
    let tangential = (1.0 - df * df) / (f * f);
    let dt = axis(4, 3);
    let exact = c.chart();
    for j in 0..3 {
        assert!((sectional(&exact, &p, &dt, &axis(4, j)).unwrap() - radial).abs() < 1e-12);
    }
    assert!((sectional(&exact, &p, &axis(4, 0), &axis(4, 2)).unwrap() - tangential).abs() < 1e-12);

    // The finite-difference route converges to the closed forms at second order.
    let err = |h: f64| {
        let ch = FdChart::new(c.chart(), FiniteDifference::plain(h));
        let a = (sectional(&ch, &p, &dt, &axis(4, 1)).unwrap() - radial).abs();
        let b = (sectional(&ch, &p, &axis(4, 0), &axis(4, 1)).unwrap() - tangential).abs();
        a.max(b)
    };
    let (e1, e2, e3) = (err(2e-2), err(1e-2), err(5e-3));
    let order = ((e1 / e3).ln() / 4f64.ln()).min((e1 / e2).log2());
    assert!(order >= 1.9, "order {order} ({e1:e}, {e2:e}, {e3:e})");
}

#[test]
fn riemann_symmetries_and_bianchi() {
    let c = CollarMetric::multiply_warped(
        CrossSection::round_sphere(3),
        vec![generic_warp(), ScalarFn::sin(1.0, 1.0), ScalarFn::exp(1.0, 0.3)],
        (-0.5, 0.5),
    )
    .unwrap();
    for ch in [Box::new(c.chart()) as Box<dyn Chart>, Box::new(FdChart::new(c.chart(), FiniteDifference::default()))] {
        let curv = curvature_at(&*ch, &Point::new(vec![0.8, 1.7, 0.2], -0.2)).unwrap();
        let r = &curv.riemann;
        let scale = (0..256).map(|i| r.get(i / 64, (i / 16) % 4, (i / 4) % 4, i % 4).abs()).fold(0.0, f64::max);
        for a in 0..4 {
            for b in 0..4 {
                for cc in 0..4 {
                    for d in 0..4 {
                        let v = r.get(a, b, cc, d);
                        assert!((v + r.get(b, a, cc, d)).abs() <= 1e-9 * scale);
                        assert!((v + r.get(a, b, d, cc)).abs() <= 1e-9 * scale);
                        assert!((v - r.get(cc, d, a, b)).abs() <= 1e-9 * scale);
                        let bianchi = v + r.get(b, cc, a, d) + r.get(cc, a, b, d);
                        assert!(bianchi.abs() <= 1e-8 * scale);
                    }
                }
            }
        }
    }
}

#[test]
fn sectional_is_invariant_under_change_of_basis() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let c = CollarMetric::multiply_warped(
        CrossSection::round_sphere(3),
        vec![generic_warp(), ScalarFn::sin(1.0, 1.0), ScalarFn::exp(1.0, 0.3)],
        (-0.5, 0.5),
    )
    .unwrap();
    let ch = c.chart();
    let curv = curvature_at(&ch, &Point::new(vec![1.2, 0.9, 0.5], 0.3)).unwrap();
    for _ in 0..50 {
        let u = random_vec(&mut rng, 4);
        let v = random_vec(&mut rng, 4);
        let k = sectional_from(&curv, &u, &v).unwrap();
        let (a, b, cc, d): (f64, f64, f64, f64) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        if (a * d - b * cc).abs() < 0.1 {
            continue;
        }
        let k2 = sectional_from(&curv, &(&u * a + &v * b), &(&u * cc + &v * d)).unwrap();
        assert!((k - k2).abs() <= 1e-9 * (1.0 + k.abs()));
    }
}

#[test]
fn jacobi_operator_models() {
    let p = Point::new(vec![1.0, 1.2, 0.4], 1.1);
    let sphere = round_sphere_chart(4);
    let curv = curvature_at(&sphere.chart(), &p).unwrap();
    let frame = orthonormal_frame(&curv.metric).unwrap();
    let v = frame.column(1).into_owned();
    let j = jacobi_from(&curv, &v).unwrap();
    assert!((j - DMatrix::identity(3, 3)).amax() < 1e-9);

    let torus = flat_torus();
    let q = Point::new(vec![0.1, 0.2, 0.3], 0.0);
    let j = jacobi_operator(&torus.chart(), &q, &axis(4, 3)).unwrap();
    assert!(j.amax() < 1e-12);

    let phi = generic_warp();
    let c = CollarMetric::warped_product(phi.clone(), 4, (-0.5, 0.5)).unwrap();
    let r = Point::new(vec![0.9, 2.0, 1.0], -0.3);
    let j = jacobi_operator(&c.chart(), &r, &axis(4, 3)).unwrap();
    let expected = -phi.deriv(r.t, 2) / phi.value(r.t);
    assert!((j - DMatrix::identity(3, 3) * expected).amax() < 1e-10);

    assert!(jacobi_operator(&c.chart(), &r, &(axis(4, 3) * 2.0)).is_err());
}

fn small_plan() -> SamplingPlan {
    SamplingPlan {
        x_counts: vec![2, 2, 1],
        t_count: 3,
        directions: 60,
        ..Default::default()
    }
}

#[test]
fn ric_k_min_models() {
    let sphere = round_sphere_chart(4);
    for k in 1..=3 {
        let m = ric_k_min(&sphere.chart(), k, &small_plan()).unwrap();
        assert!((m.value - k as f64).abs() < 1e-6);
    }
    let torus = flat_torus();
    assert!(ric_k_min(&torus.chart(), 2, &small_plan()).unwrap().value.abs() < 1e-12);
    assert!(ric_k_min(&torus.chart(), 4, &small_plan()).is_err());
}

/// Brute-force oracle: min over a dense latitude grid of the eigen-sum,
/// using the cylinder's rotational symmetry about the t-axis.
#[test]
fn cylinder_ric_k_matches_brute_force() {
    let cyl = cylinder();
    let p = Point::new(vec![1.2, 1.5, 0.3], 0.0);
    let curv = curvature_at(&cyl.chart(), &p).unwrap();
    let fc = FrameCurvature::new(&curv).unwrap();
    for k in 1..=3 {
        let brute = (0..=400)
            .map(|i| {
                let a = PI * i as f64 / 400.0;
                let w = DVector::from_fn(4, |j, _| match j {
                    0 => a.sin() * 0.6,
                    1 => a.sin() * 0.8,
                    3 => a.cos(),
                    _ => 0.0,
                });
                fc.ric_k(&w.normalize(), k)
            })
            .fold(f64::INFINITY, f64::min);
        let m = ric_k_min(&cyl.chart(), k, &small_plan()).unwrap();
        assert!((m.value - brute).abs() < 1e-9, "k={k}: {} vs {brute}", m.value);
    }
    // Ric_1 and Ric_2 are attained at v = dt where both flat planes sit.
    assert!(ric_k_min(&cyl.chart(), 2, &small_plan()).unwrap().value.abs() < 1e-9);
    assert!((ric_k_min(&cyl.chart(), 3, &small_plan()).unwrap().value - 0.0).abs() < 1e-9);
}

#[test]
fn ric_k_witness_reproduces_value() {
    let c = CollarMetric::multiply_warped(
        CrossSection::round_sphere(3),
        vec![generic_warp(), ScalarFn::sin(1.0, 1.0), ScalarFn::exp(1.0, 0.3)],
        (-0.5, 0.5),
    )
    .unwrap();
    let ch = c.chart();
    for k in 1..=3 {
        let m = ric_k_min(&ch, k, &small_plan()).unwrap();
        let v = DVector::from_vec(m.direction.clone().unwrap());
        let again = ric_k_value(&ch, &m.point, &v, k).unwrap();
        assert!((again - m.value).abs() < 1e-9);
        assert_eq!(ric_k_min(&ch, k, &small_plan()).unwrap(), m);
    }
}

#[test]
fn sc_k_models() {
    let plan = small_plan();
    let sphere = round_sphere_chart(4);
    assert!((sc_k_min(&sphere.chart(), 1, &plan).unwrap().value - 3.0).abs() < 1e-6);
    let torus = flat_torus();
    for k in 1..=4 {
        assert!(sc_k_min(&torus.chart(), k, &plan).unwrap().value.abs() < 1e-12);
    }
    let cyl = cylinder();
    assert!(sc_k_min(&cyl.chart(), 1, &plan).unwrap().value.abs() < 1e-9);
    assert!((sc_k_min(&cyl.chart(), 2, &plan).unwrap().value - 2.0).abs() < 1e-9);
    assert!(sc_k_min(&cyl.chart(), 5, &plan).is_err());
}

/// Ky Fan extremality against brute-force random orthonormal frames.
#[test]
fn k_positive_sum_is_minimal_frame_trace() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a: DMatrix<f64> = DMatrix::from_fn(5, 5, |_, _| rng.gen_range(-1.0..1.0));
    let a = (&a + a.transpose()) * 0.5;
    let eig = nalgebra::SymmetricEigen::new(a.clone());
    let mut order: Vec<usize> = (0..5).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    for k in 1..=5 {
        let s = k_positive_sum(&a, k).unwrap();
        for _ in 0..2000 {
            let q = DMatrix::from_fn(5, k, |_, _| rng.gen_range(-1.0f64..1.0)).qr().q();
            let trace = (q.transpose() * &a * &q).trace();
            assert!(s <= trace + 1e-12);
        }
        let e: f64 = order.iter().take(k).map(|&i| {
            let v = eig.eigenvectors.column(i);
            (v.transpose() * &a * v)[(0, 0)]
        }).sum();
        assert!((e - s).abs() < 1e-10);
    }
}
