//! Empirical convergence orders of the spline metric as the gluing width
//! shrinks.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::curvature::{ascending_eigenvalues, curvature_from_jet, direction_set, ricci_endomorphism, sectional_from};
use crate::error::{GlueError, Result};
use crate::fit::loglog_slope;
use crate::gluing::{boundary_difference, spline_d1_check, spline_family, SplineFamily};
use crate::metric::{Chart, CollarChart, CollarMetric, SliceFamily};
use crate::verifier::certify::interval_nodes;

/// Deviations at or below this are treated as exact zeros.
pub const ZERO_DEVIATION: f64 = 1e-12;
/// Accepted slope window for `O(eps)` claims.
pub const LINEAR_WINDOW: (f64, f64) = (0.8, 1.2);
/// Largest accepted `|slope|` for `O(1)` claims.
pub const BOUNDED_SLOPE: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateClaim {
    /// The deviation is `O(eps)`.
    Linear,
    /// The deviation is `O(1)`.
    Bounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub name: String,
    pub claim: RateClaim,
    pub eps: Vec<f64>,
    pub deviations: Vec<f64>,
    /// Least-squares slope of `ln deviation` against `ln eps`; absent when a
    /// deviation vanishes.
    pub slope: Option<f64>,
    pub passed: bool,
}

impl RateReport {
    fn new(name: &str, claim: RateClaim, eps: &[f64], deviations: Vec<f64>) -> Self {
        let vanishes = deviations.iter().all(|&d| d <= ZERO_DEVIATION);
        let slope = loglog_slope(eps, &deviations);
        let passed = vanishes
            || match (claim, slope) {
                (RateClaim::Linear, Some(s)) => (LINEAR_WINDOW.0..=LINEAR_WINDOW.1).contains(&s),
                (RateClaim::Bounded, Some(s)) => s.abs() <= BOUNDED_SLOPE,
                (_, None) => false,
            };
        RateReport {
            name: name.to_string(),
            claim,
            eps: eps.to_vec(),
            deviations,
            slope,
            passed,
        }
    }
}

/// Sampling for the rate suite: cross-section nodes, t-values per width
/// (endpoints included) and tangent directions per point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateGrid {
    pub x_nodes: Vec<Vec<f64>>,
    pub t_count: usize,
    pub directions: usize,
}

/// `h(0) = L L^T`; columns of `L^{-T}` are an `h(0)`-orthonormal basis.
fn boundary_frame(h: &CollarMetric, x: &[f64]) -> Result<DMatrix<f64>> {
    let h0 = h.value(x, 0.0).into_matrix();
    let l = h0
        .cholesky()
        .ok_or_else(|| GlueError::NotPositiveDefinite { coords: [x, &[0.0]].concat() })?
        .l();
    l.transpose()
        .try_inverse()
        .ok_or_else(|| GlueError::NotPositiveDefinite { coords: [x, &[0.0]].concat() })
}

fn embed_tangent(u: &DVector<f64>) -> DVector<f64> {
    DVector::from_fn(u.len() + 1, |i, _| if i < u.len() { u[i] } else { 0.0 })
}

fn normal(n: usize) -> DVector<f64> {
    DVector::from_fn(n, |i, _| if i + 1 == n { 1.0 } else { 0.0 })
}

struct WidthDeviations {
    value: f64,
    d1: f64,
    d2: f64,
    mixed_curvature: f64,
    ricci: f64,
}

fn width_deviations(f: &SplineFamily, grid: &RateGrid) -> Result<WidthDeviations> {
    let (h1, h2) = (f.h1(), f.h2());
    let e = f.eps();
    let ch = CollarChart::new(f);
    let n = ch.dim();
    let m = n - 1;
    let dirs = direction_set(m, grid.directions);
    let mut out = WidthDeviations {
        value: 0.0,
        d1: spline_d1_check(f, &grid.x_nodes, grid.t_count).max_deviation,
        d2: 0.0,
        mixed_curvature: 0.0,
        ricci: 0.0,
    };
    for x in &grid.x_nodes {
        let d = boundary_difference(h1, h2, x).into_matrix();
        let frame = boundary_frame(h1, x)?;
        let rel = frame.transpose() * &d * &frame;
        let target2 = &d * (-1.0 / (2.0 * e));
        // Predicted 2 eps Ric in the frame (h(0)-orthonormal basis, dt).
        let mut limit = DMatrix::zeros(n, n);
        limit.view_mut((0, 0), (m, m)).copy_from(&(&rel * 0.5));
        limit[(m, m)] = 0.5 * rel.trace();
        let mut big = DMatrix::identity(n, n);
        big.view_mut((0, 0), (m, m)).copy_from(&frame);
        for t in interval_nodes(-e, e, grid.t_count) {
            let h0 = if t <= 0.0 { h1.value(x, 0.0) } else { h2.value(x, 0.0) };
            out.value = out.value.max(f.value(x, t).max_abs_diff(&h0));
            out.d2 = out.d2.max((f.d2(x, t).into_matrix() - &target2).amax());
            let coords = [x.as_slice(), &[t]].concat();
            let curv = curvature_from_jet(&ch.jet_at(&coords), &coords)?;
            for w in &dirs {
                let u = &frame * w;
                let k = sectional_from(&curv, &embed_tangent(&u), &normal(n))?;
                let predicted = 0.25 * u.dot(&(&d * &u)) / e;
                out.mixed_curvature = out.mixed_curvature.max((k - predicted).abs());
            }
            let ric = big.transpose() * &curv.ricci * &big;
            out.ricci = out.ricci.max((ric - &limit / (2.0 * e)).amax());
        }
    }
    Ok(out)
}

/// Convergence orders over an eps ladder:
///
/// * (a) `max |g_t - h_i(0)|` is `O(eps)`;
/// * (b) `g_t'` deviates from the linear interpolation of `h_1'(0)`,
///   `h_2'(0)` by `O(eps)`;
/// * (c) `g_t'' - (h_2'(0) - h_1'(0))/2eps` is `O(1)`;
/// * (d) `K(u_t, dt) - (h_1'(0) - h_2'(0))(u,u)/4eps` is `O(1)` for
///   `h(0)`-unit `u`;
/// * (e) `Ric - 1/2eps L` is `O(1)` in an `h(0)`-orthonormal frame, where
///   `L` is the block-diagonal limit of `2 eps Ric`:
///   `1/2 (h_1'(0) - h_2'(0))` on tangent vectors and half its trace on `dt`.
pub fn rate_suite(h1: &CollarMetric, h2: &CollarMetric, eps_list: &[f64], grid: &RateGrid) -> Result<Vec<RateReport>> {
    if eps_list.len() < 2 {
        return Err(GlueError::InvalidInput("rate fits need at least two widths".into()));
    }
    if grid.x_nodes.is_empty() {
        return Err(GlueError::EmptySampling);
    }
    let rows = eps_list
        .iter()
        .map(|&e| width_deviations(&spline_family(h1, h2, e)?, grid))
        .collect::<Result<Vec<_>>>()?;
    let col = |f: fn(&WidthDeviations) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
    Ok(vec![
        RateReport::new("slice_metric_value", RateClaim::Linear, eps_list, col(|r| r.value)),
        RateReport::new("slice_metric_first_derivative", RateClaim::Linear, eps_list, col(|r| r.d1)),
        RateReport::new("slice_metric_second_derivative", RateClaim::Bounded, eps_list, col(|r| r.d2)),
        RateReport::new("mixed_sectional_curvature", RateClaim::Bounded, eps_list, col(|r| r.mixed_curvature)),
        RateReport::new("ricci_tensor", RateClaim::Bounded, eps_list, col(|r| r.ricci)),
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RicciLimitReport {
    pub eps: f64,
    /// Node with the largest relative deviation.
    pub x: Vec<f64>,
    /// Eigenvalues of `2 eps Ric` at `(x, 0)`, ascending.
    pub observed: Vec<f64>,
    /// Ascending limit values: half the eigenvalues of `h_1'(0) - h_2'(0)`
    /// relative to `h(0)`, and half their sum.
    pub predicted: Vec<f64>,
    /// `2 eps Ric(dt, dt)` and its limit.
    pub normal_observed: f64,
    pub normal_predicted: f64,
    /// `max_i |observed_i - predicted_i| / |predicted_i|`, worst over the nodes.
    pub max_relative_deviation: f64,
}

/// Compares the eigenvalues of `2 eps Ric` on the middle slice with their
/// limit as `eps -> 0`.
pub fn ricci_limit(h1: &CollarMetric, h2: &CollarMetric, eps: f64, x_nodes: &[Vec<f64>]) -> Result<RicciLimitReport> {
    let f = spline_family(h1, h2, eps)?;
    let ch = CollarChart::new(&f);
    let n = ch.dim();
    let mut best: Option<RicciLimitReport> = None;
    for x in x_nodes {
        let frame = boundary_frame(h1, x)?;
        let d = boundary_difference(h1, h2, x).into_matrix();
        let rel = frame.transpose() * &d * &frame;
        let half = ascending_eigenvalues(&((&rel + rel.transpose()) * 0.25));
        let mut predicted = half.clone();
        predicted.push(half.iter().sum());
        predicted.sort_by(|a, b| a.total_cmp(b));
        let coords = [x.as_slice(), &[0.0]].concat();
        let curv = curvature_from_jet(&ch.jet_at(&coords), &coords)?;
        let observed: Vec<f64> = ascending_eigenvalues(&ricci_endomorphism(&curv)?)
            .iter()
            .map(|v| 2.0 * eps * v)
            .collect();
        let dev = observed
            .iter()
            .zip(&predicted)
            .map(|(o, p)| (o - p).abs() / p.abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max);
        let dt = normal(n);
        let normal_observed = 2.0 * eps * dt.dot(&(&curv.ricci * &dt));
        let normal_predicted = half.iter().sum();
        if best.as_ref().map_or(true, |b| dev > b.max_relative_deviation) {
            best = Some(RicciLimitReport {
                eps,
                x: x.clone(),
                observed,
                predicted,
                normal_observed,
                normal_predicted,
                max_relative_deviation: dev,
            });
        }
    }
    best.ok_or(GlueError::EmptySampling)
}
