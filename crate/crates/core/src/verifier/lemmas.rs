use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curvature::{curvature_at_coords, curvature_from_jet, sectional_from, CurvatureAtPoint};
use crate::error::{GlueError, Result};
use crate::fit::loglog_slope;
use crate::gluing::{assemble_glued, second_fundamental_form, spline_family, GluingParams, SplineFamily};
use crate::metric::{Chart, CollarChart, CollarMetric, FdChart, FiniteDifference, SliceChart, SliceFamily};
use crate::smoothing::smooth_glued;
use crate::verifier::certify::interval_nodes;
use crate::verifier::rates::{LINEAR_WINDOW, ZERO_DEVIATION};

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(dim, |_, _| rng.gen_range(-1.0..1.0));
        let norm = v.norm();
        if norm > 1e-3 && norm <= 1.0 {
            return v / norm;
        }
    }
}

fn embed(u: &DVector<f64>) -> DVector<f64> {
    DVector::from_fn(u.len() + 1, |i, _| if i < u.len() { u[i] } else { 0.0 })
}

fn cholesky_frame(g: DMatrix<f64>, coords: &[f64]) -> Result<DMatrix<f64>> {
    g.cholesky()
        .and_then(|c| c.l().transpose().try_inverse())
        .ok_or_else(|| GlueError::NotPositiveDefinite { coords: coords.to_vec() })
}

// ---------------------------------------------------------------------------
// Gauss equation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussReport {
    pub planes: usize,
    /// Planes skipped because they were numerically degenerate.
    pub degenerate: usize,
    pub fd: FiniteDifference,
    pub max_residual: f64,
    pub witness: Vec<f64>,
}

/// One random tangential plane at a random point.
struct PlaneSample {
    coords: Vec<f64>,
    u: DVector<f64>,
    v: DVector<f64>,
}

fn plane_samples<F: SliceFamily>(f: &F, count: usize, margin: f64, seed: u64) -> Vec<PlaneSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = f.section().domain();
    let (lo, hi) = f.t_range();
    let m = d.dim();
    (0..count)
        .map(|_| {
            let mut coords: Vec<f64> = (0..m).map(|i| rng.gen_range(d.lower[i]..d.upper[i])).collect();
            coords.push(rng.gen_range(lo + margin..hi - margin));
            PlaneSample {
                coords,
                u: random_unit(&mut rng, m),
                v: random_unit(&mut rng, m),
            }
        })
        .collect()
}

/// `K_t(u,v) - phi_t(u,v) / psi_t(u,v)` with
/// `phi_t = g_t'(u,u) g_t'(v,v) - g_t'(u,v)^2` and
/// `psi_t = 4 (g_t(u,u) g_t(v,v) - g_t(u,v)^2)`.
fn gauss_rhs<F: SliceFamily>(f: &F, s: &PlaneSample) -> Result<f64> {
    let (x, t) = s.coords.split_at(s.coords.len() - 1);
    let slice = SliceChart::new(f, t[0]);
    let intrinsic = sectional_from(&curvature_at_coords(&slice, x)?, &s.u, &s.v)?;
    let phi = f.d1(x, t[0]).plane_det(&s.u, &s.v);
    let psi = 4.0 * f.value(x, t[0]).plane_det(&s.u, &s.v);
    Ok(intrinsic - phi / psi)
}

fn gauss_residuals<F: SliceFamily>(f: &F, samples: &[PlaneSample], fd: FiniteDifference) -> Result<(Vec<f64>, usize)> {
    let ambient = FdChart::new(CollarChart::new(f), fd);
    let mut out = Vec::with_capacity(samples.len());
    let mut degenerate = 0;
    for s in samples {
        let curv = curvature_from_jet(&ambient.jet_at(&s.coords), &s.coords)?;
        let lhs = sectional_from(&curv, &embed(&s.u), &embed(&s.v));
        match (lhs, gauss_rhs(f, s)) {
            (Ok(a), Ok(b)) => out.push((a - b).abs()),
            (Err(GlueError::DegeneratePlane { .. }), _) | (_, Err(GlueError::DegeneratePlane { .. })) => {
                degenerate += 1;
                out.push(f64::NAN);
            }
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    }
    Ok((out, degenerate))
}

/// Residual of the Gauss equation on random tangential planes: the ambient
/// sectional curvature (finite differences of the full metric) against the
/// intrinsic slice curvature corrected by `phi_t / psi_t`.
pub fn gauss_check<F: SliceFamily>(f: &F, planes: usize, fd: FiniteDifference, seed: u64) -> Result<GaussReport> {
    let samples = plane_samples(f, planes, 4.0 * fd.step, seed);
    let (res, degenerate) = gauss_residuals(f, &samples, fd)?;
    let (mut max_residual, mut witness) = (0.0, vec![]);
    for (r, s) in res.iter().zip(&samples) {
        if *r > max_residual || witness.is_empty() && r.is_finite() {
            max_residual = *r;
            witness = s.coords.clone();
        }
    }
    Ok(GaussReport {
        planes,
        degenerate,
        fd,
        max_residual,
        witness,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussOrderReport {
    pub steps: Vec<f64>,
    pub max_residuals: Vec<f64>,
    /// Fitted order of the residual in the step (plain central differences).
    pub order: Option<f64>,
}

/// Residual of the Gauss equation against the finite-difference step, on
/// the same planes for every step.
pub fn gauss_order<F: SliceFamily>(f: &F, planes: usize, steps: &[f64], seed: u64) -> Result<GaussOrderReport> {
    let widest = steps.iter().copied().fold(0.0, f64::max);
    let samples = plane_samples(f, planes, 4.0 * widest, seed);
    let max_residuals = steps
        .iter()
        .map(|&h| {
            let (res, _) = gauss_residuals(f, &samples, FiniteDifference::plain(h))?;
            Ok(res.into_iter().filter(|r| r.is_finite()).fold(0.0, f64::max))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(GaussOrderReport {
        steps: steps.to_vec(),
        order: loglog_slope(steps, &max_residuals),
        max_residuals,
    })
}

// ---------------------------------------------------------------------------
// Interpolation bound for sums of sectional curvatures
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpolationReport {
    pub k: usize,
    pub eps: Vec<f64>,
    /// `min (LHS - RHS)` over the grid, per width.
    pub min_gap: Vec<f64>,
    /// `max(0, -min_gap)`.
    pub violation: Vec<f64>,
    /// `max |LHS - RHS|` at `t = -+eps`.
    pub endpoint_gap: Vec<f64>,
    pub violation_slope: Option<f64>,
    pub endpoint_slope: Option<f64>,
    /// The violation stays below `INTERPOLATION_FLOOR` or decays at order at
    /// least 0.8.
    pub passed: bool,
}

/// Violations at or below this are rounding in the curvature sums: the
/// spline jets carry `1/eps` second derivatives, so absolute errors of a
/// few `1e-12` appear even where the bound holds with equality.
pub const INTERPOLATION_FLOOR: f64 = 1e-9;

/// Frames `(v, e^1, ..., e^k)`, `h(0)`-orthonormal, in coordinates.
fn boundary_frames(h: &CollarMetric, x: &[f64], k: usize, count: usize, rng: &mut ChaCha8Rng) -> Result<Vec<DMatrix<f64>>> {
    let m = h.dim() - 1;
    let basis = cholesky_frame(h.value(x, 0.0).into_matrix(), x)?;
    Ok((0..count)
        .map(|_| {
            let raw = DMatrix::from_fn(m, k + 1, |_, _| rng.gen_range(-1.0..1.0));
            let q = raw.qr().q();
            &basis * q
        })
        .collect())
}

fn frame_sum(curv: &CurvatureAtPoint, frame: &DMatrix<f64>) -> Result<f64> {
    let v = embed(&frame.column(0).into_owned());
    (1..frame.ncols())
        .map(|i| sectional_from(curv, &v, &embed(&frame.column(i).into_owned())))
        .sum()
}

fn curvature_of<F: SliceFamily>(f: &F, x: &[f64], t: f64) -> Result<CurvatureAtPoint> {
    let ch = CollarChart::new(f);
    let coords = [x, &[t]].concat();
    curvature_from_jet(&ch.jet_at(&coords), &coords)
}

/// Checks `sum_i K_g(v_t, e^i_t) >= (eps-t)/2eps sum_i K_{h_1}(v_0, e^i_0)
/// + (eps+t)/2eps sum_i K_{h_2}(v_0, e^i_0) + O(eps)` on sampled frames,
/// where the right-hand curvatures are those of the collars at `t = 0`.
#[allow(clippy::too_many_arguments)]
pub fn interpolation_bound_check(
    h1: &CollarMetric,
    h2: &CollarMetric,
    k: usize,
    eps_list: &[f64],
    x_nodes: &[Vec<f64>],
    t_count: usize,
    frames: usize,
    seed: u64,
) -> Result<InterpolationReport> {
    let m = h1.dim() - 1;
    if k == 0 || k + 1 > m {
        return Err(GlueError::InvalidInput(format!("frames of k + 1 = {} tangent vectors need k + 1 <= {m}", k + 1)));
    }
    if x_nodes.is_empty() || frames == 0 {
        return Err(GlueError::EmptySampling);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Frames and boundary sums are shared by every width.
    let mut per_node = Vec::with_capacity(x_nodes.len());
    for x in x_nodes {
        let (c1, c2) = (curvature_of(h1, x, 0.0)?, curvature_of(h2, x, 0.0)?);
        let fs = boundary_frames(h1, x, k, frames, &mut rng)?;
        let sums = fs
            .iter()
            .map(|fr| Ok((frame_sum(&c1, fr)?, frame_sum(&c2, fr)?)))
            .collect::<Result<Vec<_>>>()?;
        per_node.push((fs, sums));
    }
    let mut min_gap = vec![];
    let mut endpoint_gap = vec![];
    for &e in eps_list {
        let f: SplineFamily = spline_family(h1, h2, e)?;
        let (mut lo, mut ends) = (f64::INFINITY, 0.0f64);
        for (x, (fs, sums)) in x_nodes.iter().zip(&per_node) {
            for t in interval_nodes(-e, e, t_count.max(2)) {
                let curv = curvature_of(&f, x, t)?;
                for (fr, (s1, s2)) in fs.iter().zip(sums) {
                    let lhs = frame_sum(&curv, fr)?;
                    let rhs = (e - t) / (2.0 * e) * s1 + (e + t) / (2.0 * e) * s2;
                    lo = lo.min(lhs - rhs);
                    if t.abs() == e {
                        ends = ends.max((lhs - rhs).abs());
                    }
                }
            }
        }
        min_gap.push(lo);
        endpoint_gap.push(ends);
    }
    let violation: Vec<f64> = min_gap.iter().map(|g| (-g).max(0.0)).collect();
    let violation_slope = loglog_slope(eps_list, &violation);
    let endpoint_slope = loglog_slope(eps_list, &endpoint_gap);
    let passed = violation.iter().all(|&v| v <= INTERPOLATION_FLOOR) || violation_slope.is_some_and(|s| s >= LINEAR_WINDOW.0);
    Ok(InterpolationReport {
        k,
        eps: eps_list.to_vec(),
        min_gap,
        violation,
        endpoint_gap,
        violation_slope,
        endpoint_slope,
        passed,
    })
}

// ---------------------------------------------------------------------------
// Nearly orthonormal frames
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaReport {
    pub eps: Vec<f64>,
    pub eta: Vec<f64>,
    pub slope: Option<f64>,
    /// `eta` vanishes identically or decays at order at least 0.8.
    pub passed: bool,
}

/// Largest deviation from `h(0)`-orthonormality over `frames` random
/// `g_t`-orthonormal frames of the slice at each `(x, t)`, with
/// `t` on `t_count` nodes of `[-eps, eps]`. Frames are drawn from one
/// seeded stream in a fixed order, so more frames never lower the result.
pub fn eta_of(f: &SplineFamily, x_nodes: &[Vec<f64>], t_count: usize, frames: usize, seed: u64) -> Result<f64> {
    let e = f.eps();
    let h = f.h1();
    let m = f.section().dim();
    let mut eta: f64 = 0.0;
    for x in x_nodes {
        let h0 = h.value(x, 0.0).into_matrix();
        for (j, t) in interval_nodes(-e, e, t_count.max(2)).into_iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (j as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let base = cholesky_frame(f.value(x, t).into_matrix(), &[x.as_slice(), &[t]].concat())?;
            for _ in 0..frames {
                let q = DMatrix::from_fn(m, m, |_, _| rng.gen_range(-1.0..1.0)).qr().q();
                let fr = &base * q;
                let gram = fr.transpose() * &h0 * &fr;
                eta = eta.max((gram - DMatrix::identity(m, m)).amax());
            }
        }
    }
    Ok(eta)
}

pub fn eta_frame_report(
    h1: &CollarMetric,
    h2: &CollarMetric,
    eps_list: &[f64],
    x_nodes: &[Vec<f64>],
    t_count: usize,
    frames: usize,
    seed: u64,
) -> Result<EtaReport> {
    let eta = eps_list
        .iter()
        .map(|&e| eta_of(&spline_family(h1, h2, e)?, x_nodes, t_count, frames, seed))
        .collect::<Result<Vec<f64>>>()?;
    let slope = loglog_slope(eps_list, &eta);
    let passed = eta.iter().all(|&v| v <= ZERO_DEVIATION) || slope.is_some_and(|s| s >= LINEAR_WINDOW.0);
    Ok(EtaReport {
        eps: eps_list.to_vec(),
        eta,
        slope,
        passed,
    })
}

// ---------------------------------------------------------------------------
// Doubles
// ---------------------------------------------------------------------------

pub const MIRROR_SYMMETRY_TOL: f64 = 1e-10;
pub const TOTALLY_GEODESIC_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TotallyGeodesicReport {
    /// Set when the second collar is not the mirror image of the first.
    pub precondition_violation: Option<String>,
    /// Smoothing band actually used (halved from `params.nu` when the
    /// budget could not be met).
    pub nu: f64,
    /// `max |g(x,t) - g(x,-t)|` over the grid.
    pub symmetry_defect: f64,
    /// `max |II(x, 0)|` over the cross-section nodes.
    pub second_fundamental_form: f64,
    pub passed: bool,
}

/// Smallest band tried by [`totally_geodesic_check`].
pub const TOTALLY_GEODESIC_NU_MIN: f64 = 1e-5;

/// Glues `h1` to its mirror image, smooths, and checks that the middle
/// slice is totally geodesic. When the smoothing budget cannot be met with
/// `params.nu` the band is halved, down to [`TOTALLY_GEODESIC_NU_MIN`].
pub fn totally_geodesic_check(
    h1: &CollarMetric,
    h2: &CollarMetric,
    params: &GluingParams,
    x_nodes: &[Vec<f64>],
    t_count: usize,
) -> Result<TotallyGeodesicReport> {
    if *h1 != h2.mirror() {
        return Ok(TotallyGeodesicReport {
            precondition_violation: Some("second collar is not the mirror image of the first".into()),
            nu: params.nu,
            symmetry_defect: f64::NAN,
            second_fundamental_form: f64::NAN,
            passed: false,
        });
    }
    let glued = assemble_glued(h1, h2, params)?;
    let mut nu = params.nu;
    let s = loop {
        match smooth_glued(&glued, nu, params.mu) {
            Err(GlueError::BudgetInfeasible { .. }) if 0.5 * nu >= TOTALLY_GEODESIC_NU_MIN => nu *= 0.5,
            other => break other?,
        }
    };
    let reach = s.t_range().1;
    let (mut sym, mut ii) = (0.0f64, 0.0f64);
    for x in x_nodes {
        for t in interval_nodes(0.0, reach, t_count.max(2)) {
            sym = sym.max(s.value(x, t).max_abs_diff(&s.value(x, -t)));
        }
        ii = ii.max(second_fundamental_form(&s, x, 0.0).matrix().amax());
    }
    Ok(TotallyGeodesicReport {
        precondition_violation: None,
        nu,
        symmetry_defect: sym,
        second_fundamental_form: ii,
        passed: sym <= MIRROR_SYMMETRY_TOL && ii <= TOTALLY_GEODESIC_TOL,
    })
}
