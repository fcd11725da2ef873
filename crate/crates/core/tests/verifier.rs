use std::f64::consts::PI;

use collar_glue::curvature::*;
use collar_glue::gluing::*;
use collar_glue::metric::*;
use collar_glue::scalar::ScalarFn;
use collar_glue::verifier::*;
use collar_glue::GlueError;
use nalgebra::DMatrix;

const R: f64 = PI / 3.0;

fn cap(depth: f64) -> CollarMetric {
    CollarMetric::warped_product(ScalarFn::sin(-1.0, R), 4, (0.0, depth)).unwrap()
}

fn hemisphere_double() -> (CollarMetric, CollarMetric) {
    let h2 = cap(1.0);
    (h2.mirror(), h2)
}

fn flat_double() -> (CollarMetric, CollarMetric) {
    let h2 = CollarMetric::diagonal_torus(vec![ScalarFn::constant(1.0); 3], (0.0, 1.0)).unwrap();
    (h2.mirror(), h2)
}

fn cylinder_double() -> (CollarMetric, CollarMetric) {
    let h2 = CollarMetric::warped_product(ScalarFn::constant(1.0), 4, (0.0, 1.0)).unwrap();
    (h2.mirror(), h2)
}

/// Round cap of radius `sin r` on the left, cylinder of the same radius on the right.
fn cap_on_cylinder() -> (CollarMetric, CollarMetric) {
    let h2 = CollarMetric::warped_product(ScalarFn::constant(R.sin()), 4, (0.0, 1.0)).unwrap();
    (cap(1.0).mirror(), h2)
}

/// Warped double whose pieces have slightly negative radial curvature.
fn mildly_negative_double() -> (CollarMetric, CollarMetric) {
    let h2 = CollarMetric::warped_product(ScalarFn::polynomial(vec![1.0, -0.1, 0.02]), 4, (0.0, 1.0)).unwrap();
    (h2.mirror(), h2)
}

fn generic_pair() -> (CollarMetric, CollarMetric) {
    let h1 = CollarMetric::warped_product(ScalarFn::sin(1.0, 1.0), 4, (-0.9, 0.0)).unwrap();
    let h2 = CollarMetric::warped_product(ScalarFn::polynomial(vec![1f64.sin(), -0.3, 0.2]), 4, (0.0, 1.0)).unwrap();
    (h1, h2)
}

fn product_pair() -> (CollarMetric, CollarMetric) {
    let h2 = CollarMetric::warped_product(ScalarFn::constant(1.0), 4, (0.0, 1.0)).unwrap();
    (h2.mirror(), h2)
}

fn sphere_nodes() -> Vec<Vec<f64>> {
    SamplingPlan::default().section_nodes(&CrossSection::round_sphere(3))
}

const LADDER: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];

// ---------------------------------------------------------------------------
// certify
// ---------------------------------------------------------------------------

#[test]
fn hemisphere_double_certifies_sectional_curvature() {
    let (h1, h2) = hemisphere_double();
    let g = assemble_glued(&h1, &h2, &GluingParams::with_eps(0.1)).unwrap();
    let c = certify(&g, CurvatureMode::RicK, 1, 0.0, &SamplingPlan::default()).unwrap();
    assert!(c.passed);
    for r in [Region::H1, Region::H2] {
        assert!((c.region(r).unwrap().min_value - 1.0).abs() < 1e-6, "{r:?}");
    }
    assert!(c.region(Region::Spline).unwrap().min_value > 0.0);
    let region_min = c.regions.iter().map(|r| r.min_value).fold(f64::INFINITY, f64::min);
    assert_eq!(c.min_value, region_min);
    assert!((c.reproduced_value - c.min_value).abs() <= WITNESS_TOL * c.min_value.abs().max(1.0));
}

#[test]
fn certificates_are_reproducible() {
    let (h1, h2) = hemisphere_double();
    let g = smooth_glued_default(&h1, &h2, 0.2);
    let plan = SamplingPlan::default();
    let a = certify(&g, CurvatureMode::RicK, 2, 0.0, &plan).unwrap();
    let b = certify(&g, CurvatureMode::RicK, 2, 0.0, &plan).unwrap();
    assert_eq!(a.min_value.to_bits(), b.min_value.to_bits());
    assert_eq!(a.witness, b.witness);
    assert_eq!(a, b);
    assert_eq!(a.regions.len(), 5);
    let region_min = a.regions.iter().map(|r| r.min_value).fold(f64::INFINITY, f64::min);
    assert_eq!(a.min_value, region_min);
}

fn smooth_glued_default(h1: &CollarMetric, h2: &CollarMetric, eps: f64) -> collar_glue::smoothing::SmoothedGlued {
    let p = GluingParams::with_eps(eps);
    collar_glue::smoothing::smooth_glued(&assemble_glued(h1, h2, &p).unwrap(), p.nu, p.mu).unwrap()
}

#[test]
fn flat_double_fails_at_zero() {
    let (h1, h2) = flat_double();
    let g = assemble_glued(&h1, &h2, &GluingParams::with_eps(0.1)).unwrap();
    let c = certify(&g, CurvatureMode::RicK, 1, 0.0, &SamplingPlan::default()).unwrap();
    assert_eq!(c.min_value, 0.0);
    assert!(!c.passed);
}

#[test]
fn cap_on_cylinder_ricci_matches_smallest_ricci_eigenvalue() {
    let (h1, h2) = cap_on_cylinder();
    let g = assemble_glued(&h1, &h2, &GluingParams::with_eps(0.1)).unwrap();
    let plan = SamplingPlan::default();
    let ric = certify(&g, CurvatureMode::RicK, 3, 0.0, &plan).unwrap();
    let sc1 = certify(&g, CurvatureMode::ScK, 1, 0.0, &plan).unwrap();
    assert_eq!(ric.passed, ric.regions.iter().all(|r| r.min_value > 0.0));
    // The cylinder is Ricci-flat along dt.
    assert!(ric.region(Region::H2).unwrap().min_value.abs() < 1e-12);
    assert!(!ric.passed);
    // The cap is Einstein with Ric = 3.
    assert!((ric.region(Region::H1).unwrap().min_value - 3.0).abs() < 1e-6);
    // Ric_{n-1}(v) = Ric(v, v), whose minimum over unit v is the smallest
    // Ricci eigenvalue, i.e. Sc_1.
    for (a, b) in ric.regions.iter().zip(&sc1.regions) {
        assert!(a.min_value >= b.min_value - 1e-9, "{:?}", a.region);
        assert!(a.min_value - b.min_value <= 1e-3 * b.min_value.abs().max(1.0), "{:?}", a.region);
    }
}

// ---------------------------------------------------------------------------
// epsilon-nu search
// ---------------------------------------------------------------------------

fn search(pair: &(CollarMetric, CollarMetric), k: usize, kappa: f64, schedule: &SearchSchedule) -> SearchReport {
    epsilon_nu_search(
        &pair.0,
        &pair.1,
        CurvatureMode::RicK,
        k,
        kappa,
        &GluingParams::default(),
        schedule,
        &SamplingPlan::default(),
    )
    .unwrap()
}

#[test]
fn hemisphere_search_finds_a_smooth_certificate() {
    let r = search(&hemisphere_double(), 1, 0.0, &SearchSchedule::default());
    let (p, c) = r.certified().expect("certified");
    assert!(c.margin() > 0.0);
    assert!(p.nu < p.eps);
    assert_eq!(r.trace.last().unwrap().stage, Stage::Smooth);
    assert!(r.trace.last().unwrap().passed);
    // The certificate belongs to the rebuilt metric.
    let s = rebuild(&hemisphere_double().0, &hemisphere_double().1, p).unwrap();
    let again = certify(&s, CurvatureMode::RicK, 1, 0.0, &SamplingPlan::default()).unwrap();
    assert_eq!(&again, c);
}

#[test]
fn flat_double_search_stops_at_the_boundary_condition() {
    let r = search(&flat_double(), 1, 0.0, &SearchSchedule::default());
    assert!(r.is_inconclusive());
    assert!(r.trace.is_empty());
    match &r.outcome {
        SearchOutcome::Inconclusive { reason } => assert!(reason.contains("boundary")),
        _ => unreachable!(),
    }
}

#[test]
fn search_trace_is_monotone_in_kappa() {
    let pair = mildly_negative_double();
    let schedule = SearchSchedule {
        eps_min: 0.02,
        ..Default::default()
    };
    let low = search(&pair, 1, -0.5, &schedule);
    let zero = search(&pair, 1, 0.0, &schedule);
    let (p_low, _) = low.certified().expect("kappa = -0.5 certifies");
    assert!(zero.is_inconclusive());
    let best_zero = zero.certified().map_or(0.0, |(p, _)| p.eps);
    assert!(p_low.eps > best_zero);
    // Same C1 candidates give the same minima, and passing at kappa = 0
    // would imply passing at -0.5.
    for b in zero.trace.iter().filter(|a| a.stage == Stage::C1) {
        if let Some(a) = low.trace.iter().find(|a| a.stage == Stage::C1 && a.eps == b.eps) {
            assert_eq!(a.min_value, b.min_value);
            assert!(a.passed);
            assert!(!b.passed);
        }
    }
    assert!(zero.trace.iter().any(|b| b.eps == p_low.eps && b.stage == Stage::C1));
}

// ---------------------------------------------------------------------------
// rates
// ---------------------------------------------------------------------------

fn rate_grid() -> RateGrid {
    RateGrid {
        x_nodes: sphere_nodes(),
        t_count: 9,
        directions: 40,
    }
}

#[test]
fn flat_constant_collars_have_zero_deviations() {
    let (h1, h2) = flat_double();
    let grid = RateGrid {
        x_nodes: SamplingPlan::default().section_nodes(&CrossSection::unit_torus(3)),
        ..rate_grid()
    };
    for r in rate_suite(&h1, &h2, &LADDER, &grid).unwrap() {
        assert!(r.deviations.iter().all(|&d| d <= ZERO_DEVIATION), "{}: {:?}", r.name, r.deviations);
        assert!(r.passed);
    }
}

#[test]
fn round_product_keeps_only_its_own_ricci() {
    // S^3 x R: the spline is the product itself, so only the Ricci check sees
    // anything, namely Ric = 2 on the sphere directions at every width.
    let (h1, h2) = product_pair();
    for r in rate_suite(&h1, &h2, &LADDER, &rate_grid()).unwrap() {
        if r.name == "ricci_tensor" {
            assert!(r.deviations.iter().all(|&d| (d - 2.0).abs() <= 1e-9), "{:?}", r.deviations);
            assert!(r.slope.unwrap().abs() <= 1e-9);
        } else {
            assert!(r.deviations.iter().all(|&d| d <= ZERO_DEVIATION), "{}: {:?}", r.name, r.deviations);
        }
        assert!(r.passed);
    }
}

#[test]
fn generic_pair_rates_fit_their_orders() {
    let (h1, h2) = generic_pair();
    let reports = rate_suite(&h1, &h2, &LADDER, &rate_grid()).unwrap();
    assert_eq!(reports.len(), 5);
    for r in &reports {
        let s = r.slope.expect("nonzero deviations");
        match r.claim {
            RateClaim::Linear => assert!((0.8..=1.2).contains(&s), "{}: {s}", r.name),
            RateClaim::Bounded => assert!(s.abs() <= 0.2, "{}: {s}", r.name),
        }
        assert!(r.passed);
    }
}

#[test]
fn mirror_pair_normal_ricci_limit() {
    let (h1, h2) = hemisphere_double();
    let r = ricci_limit(&h1, &h2, 1e-3, &sphere_nodes()).unwrap();
    // h1'(0) - h2'(0) = 4 sin r cos r sigma against h(0) = sin^2 r sigma:
    // relative eigenvalues 4 cot r, three of them, halved and summed.
    let expected = 6.0 / R.tan();
    assert!((r.normal_predicted - expected).abs() < 1e-12);
    assert!((r.normal_observed - expected).abs() <= 0.1 * expected);
    assert!(r.max_relative_deviation <= 0.1);
}

// ---------------------------------------------------------------------------
// Gauss equation
// ---------------------------------------------------------------------------

#[test]
fn gauss_residual_vanishes_on_products() {
    let (h1, h2) = product_pair();
    let f = spline_family(&h1, &h2, 0.1).unwrap();
    // Richardson at a wider step keeps the rounding floor below 1e-8.
    let fd = FiniteDifference {
        step: 1e-3,
        richardson: true,
    };
    let r = gauss_check(&f, 50, fd, 3).unwrap();
    assert!(r.max_residual <= 1e-8, "{}", r.max_residual);
}

#[test]
fn gauss_residual_on_a_warped_pair() {
    let (h1, h2) = generic_pair();
    let f = spline_family(&h1, &h2, 0.1).unwrap();
    let r = gauss_check(&f, 100, FiniteDifference::default(), 11).unwrap();
    assert!(r.max_residual <= 1e-6, "{}", r.max_residual);
    assert!(r.degenerate < 100);
    let o = gauss_order(&f, 30, &[1e-2, 5e-3, 2.5e-3], 11).unwrap();
    assert!(o.order.unwrap() >= 1.9, "{:?}", o);
}

// ---------------------------------------------------------------------------
// interpolation bound and frames
// ---------------------------------------------------------------------------

#[test]
fn interpolation_bound_is_exact_for_products() {
    let (h1, h2) = product_pair();
    let r = interpolation_bound_check(&h1, &h2, 1, &LADDER, &sphere_nodes(), 5, 4, 7).unwrap();
    assert!(r.min_gap.iter().all(|g| g.abs() <= INTERPOLATION_FLOOR), "{:?}", r.min_gap);
    assert!(r.passed);
}

#[test]
fn interpolation_bound_on_round_double() {
    let (h1, h2) = hemisphere_double();
    let r = interpolation_bound_check(&h1, &h2, 2, &LADDER, &sphere_nodes(), 5, 4, 7).unwrap();
    assert!(r.passed, "{:?}", r);
    assert!(r.endpoint_gap.iter().zip(&LADDER).all(|(g, e)| *g <= 10.0 * e), "{:?}", r.endpoint_gap);
}

#[test]
fn eta_vanishes_for_constant_collars() {
    let (h1, h2) = product_pair();
    let r = eta_frame_report(&h1, &h2, &LADDER, &sphere_nodes(), 5, 4, 1).unwrap();
    assert!(r.eta.iter().all(|&e| e <= 1e-12));
    assert!(r.passed);
}

#[test]
fn eta_decays_linearly_and_grows_with_more_frames() {
    let (h1, h2) = generic_pair();
    let r = eta_frame_report(&h1, &h2, &LADDER, &sphere_nodes(), 5, 4, 1).unwrap();
    assert!(r.slope.unwrap() >= 0.8, "{:?}", r);
    let f = spline_family(&h1, &h2, 0.05).unwrap();
    let few = eta_of(&f, &sphere_nodes(), 5, 3, 9).unwrap();
    let many = eta_of(&f, &sphere_nodes(), 5, 12, 9).unwrap();
    assert!(many >= few);
}

// ---------------------------------------------------------------------------
// doubles
// ---------------------------------------------------------------------------

#[test]
fn hemisphere_double_has_totally_geodesic_middle() {
    let (h1, h2) = hemisphere_double();
    let r = totally_geodesic_check(&h1, &h2, &GluingParams::with_eps(0.1), &sphere_nodes(), 21).unwrap();
    assert!(r.precondition_violation.is_none());
    assert!(r.symmetry_defect <= MIRROR_SYMMETRY_TOL);
    assert!(r.second_fundamental_form <= TOTALLY_GEODESIC_TOL);
    assert!(r.passed);
}

#[test]
fn product_double_is_exactly_symmetric() {
    let (h1, h2) = product_pair();
    let r = totally_geodesic_check(&h1, &h2, &GluingParams::with_eps(0.1), &sphere_nodes(), 21).unwrap();
    assert_eq!(r.symmetry_defect, 0.0);
    assert_eq!(r.second_fundamental_form, 0.0);
}

#[test]
fn non_mirror_pair_is_reported() {
    let (h1, h2) = generic_pair();
    let r = totally_geodesic_check(&h1, &h2, &GluingParams::with_eps(0.1), &sphere_nodes(), 5).unwrap();
    assert!(r.precondition_violation.is_some());
    assert!(!r.passed);
}

// ---------------------------------------------------------------------------
// almost non-negative curvature
// ---------------------------------------------------------------------------

fn nonneg(pair: &(CollarMetric, CollarMetric), delta: f64) -> collar_glue::Result<AlmostNonnegReport> {
    almost_nonneg_check(
        &pair.0,
        &pair.1,
        CurvatureMode::RicK,
        3,
        delta,
        &GluingParams::default(),
        &SearchSchedule::default(),
        &SamplingPlan::default(),
        5,
    )
}

#[test]
fn zero_budget_is_rejected() {
    assert!(matches!(nonneg(&cylinder_double(), 0.0), Err(GlueError::InvalidInput(_))));
}

#[test]
fn cylinder_double_is_almost_nonnegative() {
    let r = nonneg(&cylinder_double(), 0.1).unwrap();
    assert!(r.precondition_violation.is_none());
    let d = r.c0_diameter.as_ref().unwrap().diameter;
    assert!((r.kappa.unwrap() + 0.1 / (2.0 * d * d)).abs() < 1e-15);
    assert!(!r.inconclusive);
    assert!(r.scaled_minimum.unwrap() >= -0.1);
    assert!(r.passed);
}

#[test]
fn negative_collars_violate_the_precondition() {
    let r = nonneg(&mildly_negative_double(), 0.1).unwrap();
    assert!(r.precondition_violation.is_some());
    assert!(!r.passed);
}

// ---------------------------------------------------------------------------
// diameter
// ---------------------------------------------------------------------------

/// Unit flat torus with every coordinate periodic.
struct FlatTorus {
    domain: Domain,
}

impl FlatTorus {
    fn new(dim: usize) -> Self {
        FlatTorus {
            domain: Domain {
                lower: vec![0.0; dim],
                upper: vec![1.0; dim],
                periodic: vec![true; dim],
            },
        }
    }
}

impl Chart for FlatTorus {
    fn dim(&self) -> usize {
        self.domain.dim()
    }
    fn domain(&self) -> &Domain {
        &self.domain
    }
    fn metric_at(&self, _: &[f64]) -> DMatrix<f64> {
        DMatrix::identity(self.dim(), self.dim())
    }
}

#[test]
fn flat_torus_diameter_is_half_the_diagonal() {
    for (dim, nodes) in [(2, 12), (3, 8)] {
        let d = diameter_estimate(&FlatTorus::new(dim), nodes).unwrap();
        let truth = (dim as f64).sqrt() / 2.0;
        assert!((d.diameter - truth).abs() <= 0.1 * truth, "dim {dim}: {}", d.diameter);
    }
}

#[test]
fn round_sphere_diameter_is_pi() {
    let s4 = CollarMetric::warped_product(ScalarFn::sin(1.0, 0.0), 4, (0.1, PI - 0.1)).unwrap();
    let d = diameter_estimate(&s4.chart(), 8).unwrap();
    assert!((d.diameter - PI).abs() <= 0.1 * PI, "{}", d.diameter);
}

#[test]
fn diameter_decreases_under_refinement() {
    let s3 = CollarMetric::warped_product(ScalarFn::sin(1.0, 0.0), 3, (0.1, PI - 0.1)).unwrap();
    let coarse = diameter_estimate(&s3.chart(), 6).unwrap().diameter;
    let fine = diameter_estimate(&s3.chart(), 12).unwrap().diameter;
    assert!(fine <= coarse * 1.02, "{coarse} -> {fine}");
    assert!(fine >= PI * 0.99);
}

#[test]
fn diameter_rejects_tiny_grids() {
    assert!(diameter_estimate(&FlatTorus::new(2), 1).is_err());
}
