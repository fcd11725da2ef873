use std::f64::consts::PI;

use collar_glue::curvature::SamplingPlan;
use collar_glue::gluing::*;
use collar_glue::metric::*;
use collar_glue::scalar::{ScalarFn, SmoothFn};
use collar_glue::smoothing::*;
use collar_glue::GlueError;

fn canonical() -> PiecewiseC1Scalar {
    PiecewiseC1Scalar::new(ScalarFn::constant(0.0), ScalarFn::polynomial(vec![0.0, 0.0, 1.0]), 0.0).unwrap()
}

fn band_grid(t0: f64, nu: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..=n).map(move |i| t0 - nu + 2.0 * nu * i as f64 / n as f64)
}

#[test]
fn already_smooth_input_is_returned_unchanged() {
    let f = ScalarFn::sin(2.0, 0.3);
    let h = PiecewiseC1Scalar::new(f.clone(), f.clone(), 0.2).unwrap();
    let m = mollify_c1(h, 0.1, 1e-6).unwrap();
    assert!(m.report().identity);
    for t in band_grid(0.2, 0.1, 100) {
        for k in 0..3 {
            assert!((m.deriv(t, k) - f.deriv(t, k)).abs() < 1e-12);
        }
    }
}

#[test]
fn canonical_instance_meets_the_contract() {
    let (nu, mu) = (0.1, 0.01);
    let m = mollify_c1(canonical(), nu, mu).unwrap();
    let h = canonical();
    let mut c1: f64 = 0.0;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    // A grid offset from the internal contract grid.
    for i in 0..1999 {
        let t = -nu + 2.0 * nu * (i as f64 + 0.37) / 1999.0;
        let [v, d, dd] = m.jet(t);
        c1 = c1.max((v - h.deriv(t, 0)).abs()).max((d - h.deriv(t, 1)).abs());
        lo = lo.min(dd);
        hi = hi.max(dd);
    }
    assert!(c1 <= mu, "C1 distance {c1}");
    assert!(lo >= -0.01 && hi <= 2.01, "second derivative range [{lo}, {hi}]");
    assert!(m.report().quadrature_change < 1e-10, "{:e}", m.report().quadrature_change);
    // Outside the band the function is untouched.
    assert_eq!(m.deriv(0.15, 0), 0.15 * 0.15);
    assert_eq!(m.deriv(-0.1, 1), 0.0);
}

#[test]
fn smoothed_function_is_c2_across_the_junction() {
    let m = mollify_c1(canonical(), 0.1, 0.01).unwrap();
    for step in [1e-3, 5e-4] {
        // One-sided second differences from each side of the junction.
        let left = (m.deriv(0.0, 0) - 2.0 * m.deriv(-step, 0) + m.deriv(-2.0 * step, 0)) / (step * step);
        let right = (m.deriv(2.0 * step, 0) - 2.0 * m.deriv(step, 0) + m.deriv(0.0, 0)) / (step * step);
        assert!((left - right).abs() <= 10.0 * step * (1.0 + m.deriv(0.0, 3).abs()), "{left} vs {right}");
        // Third-order spot check: central differences of H'' from either side.
        let d3l = (m.deriv(0.0, 2) - m.deriv(-step, 2)) / step;
        let d3r = (m.deriv(step, 2) - m.deriv(0.0, 2)) / step;
        assert!((d3l - d3r).abs() <= 10.0 * step * 1e3);
    }
    // The unsmoothed function has a jump of 2 in the second derivative.
    let h = canonical();
    assert_eq!(h.deriv(1e-9, 2) - h.deriv(-1e-9, 2), 2.0);
}

#[test]
fn c2_junction_stays_within_endpoint_interval() {
    let (nu, mu) = (0.1, 1e-3);
    let h = PiecewiseC1Scalar::new(
        ScalarFn::polynomial(vec![0.0, 0.0, 1.0]),
        ScalarFn::polynomial(vec![0.0, 0.0, 1.0, 1.0]),
        0.0,
    )
    .unwrap();
    let m = mollify_c1(h, nu, mu).unwrap();
    for t in band_grid(0.0, nu, 777) {
        let dd = m.jet(t)[2];
        assert!(dd >= 2.0 - mu && dd <= 2.0 + 6.0 * nu + mu, "H''({t}) = {dd}");
    }
}

#[test]
fn band_wider_than_the_pieces_is_rejected() {
    let h = canonical().with_domain(-0.05, 1.0);
    assert!(matches!(mollify_c1(h, 0.1, 0.01), Err(GlueError::BandTooWide { .. })));
}

#[test]
fn oscillating_piece_cannot_meet_the_second_derivative_interval() {
    let f = ScalarFn::Sum {
        terms: vec![ScalarFn::Sin { amp: 0.01, freq: 40.0, phase: 0.0 }],
    };
    let g = ScalarFn::Sum {
        terms: vec![f.clone(), ScalarFn::polynomial(vec![0.0, 0.0, 1.0])],
    };
    let h = PiecewiseC1Scalar::new(f, g, 0.0).unwrap();
    assert!(matches!(mollify_c1(h, 0.1, 0.01), Err(GlueError::BudgetInfeasible { .. })));
}

fn cap_double(eps: f64) -> GluedMetric {
    let h2 = CollarMetric::warped_product(ScalarFn::sin(-1.0, PI / 3.0), 4, (0.0, 0.5)).unwrap();
    let params = GluingParams { eps, iota: 0.1, nu: 0.005, mu: 1e-4, ..Default::default() };
    assemble_glued(&h2.mirror(), &h2, &params).unwrap()
}

fn x_nodes() -> Vec<Vec<f64>> {
    SamplingPlan::default().section_nodes(&CrossSection::round_sphere(3))
}

#[test]
fn product_glued_metric_is_unchanged() {
    let p1 = CollarMetric::warped_product(ScalarFn::constant(1.0), 4, (-1.0, 0.0)).unwrap();
    let p2 = CollarMetric::warped_product(ScalarFn::constant(1.0), 4, (0.0, 1.0)).unwrap();
    let g = assemble_glued(&p1, &p2, &GluingParams::default()).unwrap();
    let s = smooth_glued(&g, 0.005, 1e-4).unwrap();
    assert_eq!(s.report().delta, 0.0);
    for i in 0..=300 {
        let t = -0.15 + 0.001 * i as f64;
        assert!((s.profile(t, 0) - g.profile(t, 0)).amax() < 1e-12);
    }
}

#[test]
fn hemisphere_double_smoothing_is_c1_close_and_definite() {
    let (nu, mu) = (0.005, 1e-4);
    let g = cap_double(0.05);
    let s = smooth_glued(&g, nu, mu).unwrap();
    assert!(s.report().quadrature_change < 1e-10, "{:e}", s.report().quadrature_change);
    for x in x_nodes() {
        for t0 in [-0.05, 0.05] {
            let e1 = (g.one_sided_profile(t0 - nu, 2, true), g.one_sided_profile(t0 + nu, 2, false));
            let sigma = g.section().sigma(&x);
            for t in band_grid(t0, nu, 301) {
                let a = s.value(&x, t);
                assert!(a.is_positive_definite());
                assert!(a.max_abs_diff(&g.value(&x, t)) <= mu);
                assert!(s.d1(&x, t).max_abs_diff(&g.d1(&x, t)) <= mu);
                // Second-derivative interval on every coefficient at this node.
                let dd = s.d2(&x, t);
                for i in 0..3 {
                    let (l, r) = (e1.0[(i, i)] * sigma[(i, i)], e1.1[(i, i)] * sigma[(i, i)]);
                    let v = dd.matrix()[(i, i)];
                    assert!(v >= l.min(r) - mu && v <= l.max(r) + mu, "t={t} entry {i}: {v} not in [{l}, {r}]");
                }
            }
        }
    }
}

#[test]
fn smoothing_keeps_mirror_symmetry() {
    let s = smooth_glued(&cap_double(0.05), 0.005, 1e-4).unwrap();
    for x in x_nodes() {
        for i in 0..=200 {
            let t = 0.15 * i as f64 / 200.0;
            assert!(s.value(&x, t).max_abs_diff(&s.value(&x, -t)) <= 1e-10);
        }
        assert!(second_fundamental_form(&s, &x, 0.0).matrix().amax() <= 1e-8);
    }
}

#[test]
fn band_reaching_the_junction_is_rejected() {
    let g = cap_double(0.05);
    assert!(matches!(smooth_glued(&g, 0.05, 1e-4), Err(GlueError::BandTooWide { .. })));
}
