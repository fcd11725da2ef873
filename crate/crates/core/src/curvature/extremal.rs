use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::operators::{ascending_eigenvalues, jacobi_from, ricci_endomorphism, FrameCurvature};
use crate::curvature::sampling::{direction_set, perturbations, SamplingPlan};
use crate::curvature::tensor::{curvature_at, curvature_from_jet};
use crate::error::{GlueError, Result};
use crate::metric::{check_in_domain, Chart, Point};

/// Minimum of a curvature functional over a sample, with the sample that
/// attains it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureMin {
    pub value: f64,
    pub point: Point,
    /// `g`-unit coordinate direction for `Ric_k`; absent for `Sc_k`.
    pub direction: Option<Vec<f64>>,
}

fn check_k(k: usize, max: usize, what: &str) -> Result<()> {
    if k == 0 || k > max {
        return Err(GlueError::InvalidInput(format!("{what}: k = {k} outside 1..={max}")));
    }
    Ok(())
}

/// Smallest `Ric_k` over the sampled unit directions at one point, with the
/// minimising direction in frame components.
pub(crate) fn ric_k_at_point(fc: &FrameCurvature, k: usize, plan: &SamplingPlan) -> (f64, DVector<f64>) {
    let n = fc.dim();
    let mut best = f64::INFINITY;
    let mut best_dir = DVector::zeros(n);
    for w in direction_set(n, plan.directions) {
        let v = fc.ric_k(&w, k);
        if v < best {
            best = v;
            best_dir = w;
        }
    }
    let mut radius = plan.refine_radius;
    for _ in 0..plan.refine_rounds {
        let center = best_dir.clone();
        for w in perturbations(&center, radius, plan.refine_directions) {
            let v = fc.ric_k(&w, k);
            if v < best {
                best = v;
                best_dir = w;
            }
        }
        radius *= 0.5;
    }
    (best, best_dir)
}

/// Reduces per-sample results in index order; ties keep the earlier sample.
pub(crate) fn reduce_in_order(results: Vec<Result<CurvatureMin>>) -> Result<CurvatureMin> {
    let mut best: Option<CurvatureMin> = None;
    for r in results {
        let r = r?;
        if best.as_ref().map_or(true, |b| r.value < b.value) {
            best = Some(r);
        }
    }
    best.ok_or(GlueError::EmptySampling)
}

/// `min Ric_k` over the given points, each swept over the plan's directions.
pub fn ric_k_min_over(ch: &(impl Chart + ?Sized), k: usize, points: &[Point], plan: &SamplingPlan) -> Result<CurvatureMin> {
    check_k(k, ch.dim() - 1, "Ric_k")?;
    if points.is_empty() {
        return Err(GlueError::EmptySampling);
    }
    let results: Vec<Result<CurvatureMin>> = points
        .par_iter()
        .map(|p| {
            let coords = p.coords();
            check_in_domain(ch, &coords)?;
            let curv = curvature_from_jet(&ch.jet_at(&coords), &coords)?;
            let fc = FrameCurvature::new(&curv)?;
            let (value, w) = ric_k_at_point(&fc, k, plan);
            Ok(CurvatureMin {
                value,
                point: p.clone(),
                direction: Some(fc.to_coordinates(&w).iter().copied().collect()),
            })
        })
        .collect();
    reduce_in_order(results)
}

/// `min Ric_k` over the plan's grid on the whole chart domain.
pub fn ric_k_min(ch: &(impl Chart + ?Sized), k: usize, plan: &SamplingPlan) -> Result<CurvatureMin> {
    ric_k_min_over(ch, k, &plan.grid(ch.domain()), plan)
}

/// `Ric_k` at `p` in the `g`-unit direction `v` (coordinates), computed
/// through the Jacobi operator in a coordinate Gram-Schmidt basis.
pub fn ric_k_value(ch: &(impl Chart + ?Sized), p: &Point, v: &DVector<f64>, k: usize) -> Result<f64> {
    check_k(k, ch.dim() - 1, "Ric_k")?;
    let curv = curvature_at(ch, p)?;
    let j = jacobi_from(&curv, v)?;
    Ok(ascending_eigenvalues(&j).iter().take(k).sum())
}

/// Sum of the `k` smallest eigenvalues of the Ricci endomorphism at `p`.
pub fn sc_k_value(ch: &(impl Chart + ?Sized), p: &Point, k: usize) -> Result<f64> {
    check_k(k, ch.dim(), "Sc_k")?;
    let curv = curvature_at(ch, p)?;
    Ok(ascending_eigenvalues(&ricci_endomorphism(&curv)?).iter().take(k).sum())
}

pub fn sc_k_min_over(ch: &(impl Chart + ?Sized), k: usize, points: &[Point]) -> Result<CurvatureMin> {
    check_k(k, ch.dim(), "Sc_k")?;
    if points.is_empty() {
        return Err(GlueError::EmptySampling);
    }
    let results: Vec<Result<CurvatureMin>> = points
        .par_iter()
        .map(|p| {
            Ok(CurvatureMin {
                value: sc_k_value(ch, p, k)?,
                point: p.clone(),
                direction: None,
            })
        })
        .collect();
    reduce_in_order(results)
}

pub fn sc_k_min(ch: &(impl Chart + ?Sized), k: usize, plan: &SamplingPlan) -> Result<CurvatureMin> {
    sc_k_min_over(ch, k, &plan.grid(ch.domain()))
}

/// Which intermediate curvature condition is being certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurvatureMode {
    /// `Ric_k`, `1 <= k <= n - 1`.
    RicK,
    /// `Sc_k`, `1 <= k <= n`.
    ScK,
}

impl CurvatureMode {
    pub fn name(self) -> &'static str {
        match self {
            CurvatureMode::RicK => "Ric_k",
            CurvatureMode::ScK => "Sc_k",
        }
    }

    /// Largest admissible `k` in dimension `n`.
    pub fn max_k(self, n: usize) -> usize {
        match self {
            CurvatureMode::RicK => n - 1,
            CurvatureMode::ScK => n,
        }
    }

    pub fn check_k(self, k: usize, n: usize) -> Result<()> {
        check_k(k, self.max_k(n), self.name())
    }

    pub fn min_over(self, ch: &(impl Chart + ?Sized), k: usize, points: &[Point], plan: &SamplingPlan) -> Result<CurvatureMin> {
        match self {
            CurvatureMode::RicK => ric_k_min_over(ch, k, points, plan),
            CurvatureMode::ScK => sc_k_min_over(ch, k, points),
        }
    }

    /// Re-evaluates the functional at a recorded witness.
    pub fn value_at(self, ch: &(impl Chart + ?Sized), w: &CurvatureMin, k: usize) -> Result<f64> {
        match (self, &w.direction) {
            (CurvatureMode::RicK, Some(d)) => ric_k_value(ch, &w.point, &DVector::from_vec(d.clone()), k),
            (CurvatureMode::RicK, None) => Err(GlueError::InvalidInput("Ric_k witness has no direction".into())),
            (CurvatureMode::ScK, _) => sc_k_value(ch, &w.point, k),
        }
    }
}
