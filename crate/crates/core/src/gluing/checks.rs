use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curvature::{k_positive_sum, CurvatureMode};
use crate::error::{GlueError, Result};
use crate::fit::loglog_slope;
use crate::gluing::spline::{spline_family, SplineFamily};
use crate::metric::{CollarMetric, SliceFamily, SymForm};

/// Relative mismatch allowed between `h1(0)` and `h2(0)`.
const ISOMETRY_TOL: f64 = 1e-9;

/// `II_t = -1/2 g_t'` of the slice `X x {t}` with respect to `dt`.
pub fn second_fundamental_form(f: &(impl SliceFamily + ?Sized), x: &[f64], t: f64) -> SymForm {
    f.d1(x, t).scale(-0.5)
}

/// `h1'(0) - h2'(0)` at `x`.
pub fn boundary_difference(h1: &CollarMetric, h2: &CollarMetric, x: &[f64]) -> SymForm {
    &h1.d1(x, 0.0) - &h2.d1(x, 0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub mode: CurvatureMode,
    pub k: usize,
    /// Number of eigenvalues summed (`k`, or `k - 1` for `Sc_k` with `k >= n - 1`).
    pub effective_k: usize,
    pub satisfied: bool,
    pub margin: f64,
    pub witness_x: Vec<f64>,
}

fn check_isometric(h1: &CollarMetric, h2: &CollarMetric, x: &[f64]) -> Result<()> {
    let (a, b) = (h1.value(x, 0.0), h2.value(x, 0.0));
    let scale = a.matrix().amax().max(1.0);
    if a.max_abs_diff(&b) > ISOMETRY_TOL * scale {
        return Err(GlueError::InvalidInput(format!(
            "collar boundaries differ at x = {x:?} (max entry gap {:e})",
            a.max_abs_diff(&b)
        )));
    }
    Ok(())
}

/// Strict boundary condition on the sampled cross-section nodes.
///
/// For `Ric_k` the margin is the smallest eigenvalue of the coordinate
/// matrix of `h1'(0) - h2'(0)`. For `Sc_k` it is the sum of the `k'`
/// smallest eigenvalues of `h1'(0) - h2'(0)` relative to `h(0)`, where
/// `k' = k` for `k <= n - 2` and `k' = k - 1` for `k in {n - 1, n}`.
pub fn boundary_condition_check(
    h1: &CollarMetric,
    h2: &CollarMetric,
    mode: CurvatureMode,
    k: usize,
    x_nodes: &[Vec<f64>],
) -> Result<BoundaryReport> {
    if h1.section() != h2.section() {
        return Err(GlueError::DimensionMismatch("collars live on different cross-sections".into()));
    }
    let n = h1.dim();
    mode.check_k(k, n)?;
    h1.require_cover(0.0, 0.0)?;
    h2.require_cover(0.0, 0.0)?;
    if x_nodes.is_empty() {
        return Err(GlueError::EmptySampling);
    }
    let effective_k = match mode {
        CurvatureMode::RicK => k,
        CurvatureMode::ScK if k + 2 <= n => k,
        CurvatureMode::ScK => k - 1,
    };
    let mut margin = f64::INFINITY;
    let mut witness_x = x_nodes[0].clone();
    for x in x_nodes {
        if x.len() != n - 1 {
            return Err(GlueError::DimensionMismatch(format!("node {x:?} for a {n}-dimensional collar")));
        }
        check_isometric(h1, h2, x)?;
        let d = boundary_difference(h1, h2, x);
        let value = match mode {
            CurvatureMode::RicK => d.min_eigenvalue(),
            CurvatureMode::ScK => {
                let l = h1
                    .value(x, 0.0)
                    .into_matrix()
                    .cholesky()
                    .ok_or_else(|| GlueError::NotPositiveDefinite {
                        coords: [x.as_slice(), &[0.0]].concat(),
                    })?
                    .l();
                let linv = l.try_inverse().ok_or_else(|| GlueError::NotPositiveDefinite {
                    coords: [x.as_slice(), &[0.0]].concat(),
                })?;
                let rel = &linv * d.matrix() * linv.transpose();
                k_positive_sum(&((&rel + rel.transpose()) * 0.5), effective_k)?
            }
        };
        if value < margin {
            margin = value;
            witness_x = x.clone();
        }
    }
    Ok(BoundaryReport {
        mode,
        k,
        effective_k,
        satisfied: margin > 0.0,
        margin,
        witness_x,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct D1Report {
    pub eps: f64,
    /// Max entry of `g_t' - [(eps-t)/2eps h1'(0) + (eps+t)/2eps h2'(0)]`.
    pub max_deviation: f64,
    pub witness: Vec<f64>,
}

fn t_nodes(eps: f64, count: usize) -> Vec<f64> {
    let count = count.max(2);
    (0..count).map(|i| -eps + 2.0 * eps * i as f64 / (count - 1) as f64).collect()
}

/// Deviation of `g_t'` from the linear interpolation of the boundary
/// derivatives, over the x-nodes and `t_count` equispaced t-values.
pub fn spline_d1_check(f: &SplineFamily, x_nodes: &[Vec<f64>], t_count: usize) -> D1Report {
    let e = f.eps();
    let mut report = D1Report {
        eps: e,
        max_deviation: 0.0,
        witness: vec![],
    };
    for x in x_nodes {
        let d1 = f.h1().d1(x, 0.0);
        let d2 = f.h2().d1(x, 0.0);
        for t in t_nodes(e, t_count) {
            let lin = &d1.scale((e - t) / (2.0 * e)) + &d2.scale((e + t) / (2.0 * e));
            let dev = f.d1(x, t).max_abs_diff(&lin);
            if dev > report.max_deviation || report.witness.is_empty() {
                report.max_deviation = dev;
                report.witness = [x.as_slice(), &[t]].concat();
            }
        }
    }
    report
}

/// Runs [`spline_d1_check`] over an eps ladder and fits the log-log slope of
/// the deviation against eps (`None` when a deviation vanishes).
pub fn spline_d1_order(
    h1: &CollarMetric,
    h2: &CollarMetric,
    eps_list: &[f64],
    x_nodes: &[Vec<f64>],
    t_count: usize,
) -> Result<(Vec<D1Report>, Option<f64>)> {
    let reports = eps_list
        .iter()
        .map(|&e| Ok(spline_d1_check(&spline_family(h1, h2, e)?, x_nodes, t_count)))
        .collect::<Result<Vec<_>>>()?;
    let devs: Vec<f64> = reports.iter().map(|r| r.max_deviation).collect();
    Ok((reports, loglog_slope(eps_list, &devs)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub pairs: usize,
    pub min_second_difference: f64,
    /// Whether `h1'(0) - h2'(0)` was positive definite on every node.
    pub boundary_strict: bool,
    pub passed: bool,
}

/// Convexity in `t` of `det` of the 2x2 restriction of
/// `((eps-t)/2eps) h1'(0) + ((eps+t)/2eps) h2'(0)` to random planes.
/// Pairs cycle through the x-nodes; `seed` fixes the planes.
pub fn convexity_kernel_check(
    h1: &CollarMetric,
    h2: &CollarMetric,
    eps: f64,
    x_nodes: &[Vec<f64>],
    pairs: usize,
    t_count: usize,
    seed: u64,
) -> Result<ConvexityReport> {
    if x_nodes.is_empty() || pairs == 0 {
        return Err(GlueError::EmptySampling);
    }
    let m = h1.dim() - 1;
    if m < 2 {
        return Err(GlueError::DimensionMismatch("planes need a cross-section of dimension >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ts = t_nodes(eps, t_count.max(3));
    let boundary_strict = x_nodes
        .iter()
        .all(|x| boundary_difference(h1, h2, x).min_eigenvalue() > 0.0);
    let mut worst = f64::INFINITY;
    for i in 0..pairs {
        let x = &x_nodes[i % x_nodes.len()];
        let d1 = h1.d1(x, 0.0).into_matrix();
        let d2 = h2.d1(x, 0.0).into_matrix();
        let u = DVector::from_fn(m, |_, _| rng.gen_range(-1.0..1.0)).normalize();
        let v = DVector::from_fn(m, |_, _| rng.gen_range(-1.0..1.0)).normalize();
        let det = |t: f64| {
            let h: DMatrix<f64> = &d1 * ((eps - t) / (2.0 * eps)) + &d2 * ((eps + t) / (2.0 * eps));
            let (a, b, c) = (u.dot(&(&h * &u)), u.dot(&(&h * &v)), v.dot(&(&h * &v)));
            a * c - b * b
        };
        let vals: Vec<f64> = ts.iter().map(|&t| det(t)).collect();
        for w in vals.windows(3) {
            worst = worst.min(w[0] - 2.0 * w[1] + w[2]);
        }
    }
    Ok(ConvexityReport {
        pairs,
        min_second_difference: worst,
        boundary_strict,
        passed: worst >= -1e-12,
    })
}
