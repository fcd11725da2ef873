use std::f64::consts::PI;

use collar_glue::curvature::*;
use collar_glue::fit::loglog_slope;
use collar_glue::gluing::*;
use collar_glue::metric::*;
use collar_glue::scalar::ScalarFn;
use collar_glue::GlueError;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const R: f64 = PI / 3.0;

fn cap_pair() -> (CollarMetric, CollarMetric) {
    let h2 = CollarMetric::warped_product(ScalarFn::sin(-1.0, R), 4, (0.0, 0.8)).unwrap();
    (h2.mirror(), h2)
}

fn generic_pair() -> (CollarMetric, CollarMetric) {
    let h1 = CollarMetric::warped_product(ScalarFn::sin(1.0, 1.2), 4, (-0.6, 0.0)).unwrap();
    let phi2 = ScalarFn::Product {
        factors: vec![ScalarFn::constant(1.2f64.sin()), ScalarFn::exp(1.0, -0.9)],
    };
    let h2 = CollarMetric::warped_product(phi2, 4, (0.0, 0.6)).unwrap();
    (h1, h2)
}

fn product(side: (f64, f64)) -> CollarMetric {
    CollarMetric::warped_product(ScalarFn::constant(1.0), 4, side).unwrap()
}

fn x_nodes() -> Vec<Vec<f64>> {
    SamplingPlan::default().section_nodes(&CrossSection::round_sphere(3))
}

fn random_x(rng: &mut ChaCha8Rng) -> Vec<f64> {
    vec![rng.gen_range(0.1..PI - 0.1), rng.gen_range(0.1..PI - 0.1), rng.gen_range(0.0..2.0 * PI)]
}

#[test]
fn product_collars_give_a_constant_spline() {
    let f = spline_family(&product((-1.0, 0.0)), &product((0.0, 1.0)), 0.1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let x = random_x(&mut rng);
        let t = rng.gen_range(-0.1..0.1);
        let sigma = SymForm::new(f.section().sigma(&x)).unwrap();
        assert!(f.value(&x, t).max_abs_diff(&sigma) < 1e-12);
        assert!(f.d1(&x, t).matrix().amax() < 1e-12);
        assert!(f.d2(&x, t).matrix().amax() < 1e-12);
    }
}

#[test]
fn spline_interpolates_values_and_first_derivatives() {
    let (h1, h2) = generic_pair();
    let eps = 0.07;
    let f = spline_family(&h1, &h2, eps).unwrap();
    for x in x_nodes() {
        assert!(f.value(&x, -eps).max_abs_diff(&h1.value(&x, -eps)) < 1e-12);
        assert!(f.value(&x, eps).max_abs_diff(&h2.value(&x, eps)) < 1e-12);
        assert!(f.d1(&x, -eps).max_abs_diff(&h1.d1(&x, -eps)) < 1e-12);
        assert!(f.d1(&x, eps).max_abs_diff(&h2.d1(&x, eps)) < 1e-12);
    }
}

#[test]
fn mirror_pair_spline_is_even_in_t() {
    let (h1, h2) = cap_pair();
    let eps = 0.05;
    let f = spline_family(&h1, &h2, eps).unwrap();
    for x in x_nodes() {
        for i in 0..=20 {
            let t = eps * i as f64 / 20.0;
            assert!(f.value(&x, t).max_abs_diff(&f.value(&x, -t)) < 1e-12);
            assert!((f.d1(&x, t).matrix() + f.d1(&x, -t).matrix()).amax() < 1e-12);
        }
        // Symbolically g_0 = (A + B)/2 + eps/4 (dA - dB); a mirror pair has
        // B = A and dB = -dA, so g_0 = h1(-eps) + eps/2 h1'(-eps).
        let g0 = &h1.value(&x, -eps) + &h1.d1(&x, -eps).scale(eps / 2.0);
        assert!(f.value(&x, 0.0).max_abs_diff(&g0) < 1e-12);
        assert!(f.d1(&x, 0.0).matrix().amax() < 1e-12);
    }
}

#[test]
fn spline_values_approach_the_boundary_metric_at_first_order() {
    let (h1, h2) = generic_pair();
    let eps_list = [0.1, 0.05, 0.025, 0.0125];
    let devs: Vec<f64> = eps_list
        .iter()
        .map(|&e| {
            let f = spline_family(&h1, &h2, e).unwrap();
            let mut worst: f64 = 0.0;
            for x in x_nodes() {
                let h0 = h1.value(&x, 0.0);
                for i in 0..=40 {
                    let t = -e + 2.0 * e * i as f64 / 40.0;
                    worst = worst.max(f.value(&x, t).max_abs_diff(&h0));
                }
            }
            worst
        })
        .collect();
    let slope = loglog_slope(&eps_list, &devs).unwrap();
    assert!((0.8..=1.2).contains(&slope), "slope {slope}");
}

#[test]
fn first_derivative_interpolates_linearly_up_to_order_eps() {
    let c = spline_d1_check(&spline_family(&product((-1.0, 0.0)), &product((0.0, 1.0)), 0.1).unwrap(), &x_nodes(), 21);
    assert_eq!(c.max_deviation, 0.0);
    let (h1, h2) = generic_pair();
    let (reports, slope) = spline_d1_order(&h1, &h2, &[0.1, 0.05, 0.025, 0.0125], &x_nodes(), 41).unwrap();
    assert!(reports.iter().all(|r| r.max_deviation > 0.0));
    let slope = slope.unwrap();
    assert!(slope >= 0.8, "slope {slope}");
}

#[test]
fn second_fundamental_form_models() {
    let x = [0.9, 1.3, 2.0];
    let p = product((0.0, 1.0));
    assert_eq!(second_fundamental_form(&p, &x, 0.3).matrix().amax(), 0.0);

    let (h1, h2) = cap_pair();
    let ii = second_fundamental_form(&h2, &x, 0.0);
    let expected = h2.section().sigma(&x) * (R.sin() * R.cos());
    assert!((ii.matrix() - &expected).amax() < 1e-14);
    assert!(ii.is_positive_definite());

    let t = 0.2;
    assert!((second_fundamental_form(&h1, &x, -t).matrix() + second_fundamental_form(&h2, &x, t).matrix()).amax() < 1e-14);
}

/// `-g(nabla_{e_i} dt, e_j) = -g_jc Gamma^c_{it}` from finite-difference
/// Christoffel symbols of the ambient chart.
#[test]
fn second_fundamental_form_matches_ambient_covariant_derivative() {
    let (h1, h2) = generic_pair();
    let glued = assemble_glued(&h1, &h2, &GluingParams { eps: 0.1, iota: 0.2, ..Default::default() }).unwrap();
    let err_at = |fd: FiniteDifference| {
        let ch = FdChart::new(glued.chart(), fd);
        let mut worst: f64 = 0.0;
        for t in [-0.25, -0.04, 0.0, 0.06, 0.2] {
            let x = vec![1.0, 1.7, 0.4];
            let p = Point::new(x.clone(), t);
            let gamma = christoffel(&ch, &p).unwrap();
            let g = ch.metric_at(&p.coords());
            let ii = second_fundamental_form(&glued, &x, t);
            for i in 0..3 {
                for j in 0..3 {
                    let amb: f64 = -(0..4).map(|c| g[(j, c)] * gamma.get(c, i, 3)).sum::<f64>();
                    worst = worst.max((amb - ii.matrix()[(i, j)]).abs());
                }
            }
        }
        worst
    };
    assert!(err_at(FiniteDifference::default()) < 1e-8);
    let (e1, e2) = (err_at(FiniteDifference::plain(4e-3)), err_at(FiniteDifference::plain(2e-3)));
    assert!((e1 / e2).log2() >= 1.9, "{e1:e} {e2:e}");
}

#[test]
fn boundary_condition_models() {
    let (h1, h2) = cap_pair();
    let nodes = x_nodes();
    let rep = boundary_condition_check(&h1, &h2, CurvatureMode::RicK, 1, &nodes).unwrap();
    let min_sigma = nodes
        .iter()
        .map(|x| h1.section().sigma(x).diagonal().min())
        .fold(f64::INFINITY, f64::min);
    assert!(rep.satisfied);
    assert!((rep.margin - 4.0 * R.sin() * R.cos() * min_sigma).abs() < 1e-12);

    let flat = boundary_condition_check(&product((-1.0, 0.0)), &product((0.0, 1.0)), CurvatureMode::RicK, 1, &nodes).unwrap();
    assert_eq!(flat.margin, 0.0);
    assert!(!flat.satisfied);

    // h1'(0) - h2'(0) = diag(-1, 1, 1, 1) with h(0) = I, n = 5.
    let h1 = CollarMetric::diagonal_torus(
        vec![
            ScalarFn::polynomial(vec![1.0, -0.5]),
            ScalarFn::polynomial(vec![1.0, 0.5]),
            ScalarFn::polynomial(vec![1.0, 0.5]),
            ScalarFn::polynomial(vec![1.0, 0.5]),
        ],
        (-0.5, 0.0),
    )
    .unwrap();
    let h2 = CollarMetric::diagonal_torus(vec![ScalarFn::constant(1.0); 4], (0.0, 0.5)).unwrap();
    let tnodes = vec![vec![0.1, 0.2, 0.3, 0.4]];
    let sc = boundary_condition_check(&h1, &h2, CurvatureMode::ScK, 2, &tnodes).unwrap();
    assert_eq!(sc.effective_k, 2);
    assert!(sc.margin.abs() < 1e-15);
    assert!(!sc.satisfied);
    let sc5 = boundary_condition_check(&h1, &h2, CurvatureMode::ScK, 5, &tnodes).unwrap();
    assert_eq!(sc5.effective_k, 4);
    assert!((sc5.margin - 2.0).abs() < 1e-12 && sc5.satisfied);

    let torus3 = CollarMetric::diagonal_torus(vec![ScalarFn::constant(1.0); 3], (0.0, 1.0)).unwrap();
    assert!(matches!(
        boundary_condition_check(&product((-1.0, 0.0)), &torus3, CurvatureMode::RicK, 1, &nodes),
        Err(GlueError::DimensionMismatch(_))
    ));
}

#[test]
fn convexity_kernel_holds_for_strict_boundaries() {
    let (h1, h2) = cap_pair();
    let rep = convexity_kernel_check(&h1, &h2, 0.05, &x_nodes(), 1000, 21, 5).unwrap();
    assert!(rep.boundary_strict);
    assert!(rep.passed, "{rep:?}");
    let (g1, g2) = generic_pair();
    let rep = convexity_kernel_check(&g1, &g2, 0.05, &x_nodes(), 1000, 21, 6).unwrap();
    assert!(rep.boundary_strict && rep.passed);
}

#[test]
fn glued_chart_is_c1_across_the_interfaces() {
    let (h1, h2) = cap_pair();
    let params = GluingParams { eps: 0.05, iota: 0.1, ..Default::default() };
    let g = assemble_glued(&h1, &h2, &params).unwrap();
    for t in [-0.05, 0.05] {
        for order in 0..2 {
            let l = g.one_sided_profile(t, order, true);
            let r = g.one_sided_profile(t, order, false);
            assert!((l - r).amax() < 1e-12);
        }
    }
    assert!(g.interface_jump(0) < 1e-12 && g.interface_jump(1) < 1e-12);
    // The second derivative genuinely jumps: the spline has g'' ~ 1/eps.
    assert!(g.interface_jump(2) > 1.0);
    let ch = g.chart();
    for x in x_nodes() {
        let m = evaluate_metric(&ch, &Point::new(x.clone(), -0.15)).unwrap();
        assert_eq!(m[(3, 3)], 1.0);
        assert!((0..3).all(|j| m[(3, j)] == 0.0 && m[(j, 3)] == 0.0));
    }
    assert_eq!(g.region(-0.06), Region::H1);
    assert_eq!(g.region(0.0), Region::Spline);
    assert_eq!(g.region(0.07), Region::H2);
}

#[test]
fn glued_product_collars_are_globally_product() {
    let g = assemble_glued(&product((-1.0, 0.0)), &product((0.0, 1.0)), &GluingParams::default()).unwrap();
    for i in 0..=30 {
        let t = -0.15 + 0.01 * i as f64;
        assert!((g.profile(t, 0) - DMatrix::from_element(3, 3, 1.0)).amax() < 1e-12);
    }
}

#[test]
fn gluing_deeper_than_the_collars_is_rejected() {
    let (h1, h2) = cap_pair();
    let params = GluingParams { eps: 0.5, iota: 0.5, nu: 0.01, ..Default::default() };
    assert!(matches!(assemble_glued(&h1, &h2, &params), Err(GlueError::CollarTooShallow { .. })));
}
