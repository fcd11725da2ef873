use serde::{Deserialize, Serialize};

use crate::curvature::{CurvatureMode, SamplingPlan};
use crate::error::{GlueError, Result};
use crate::gluing::{assemble_glued, boundary_condition_check, BoundaryReport, GluingParams};
use crate::metric::{CollarMetric, SliceFamily};
use crate::smoothing::{smooth_glued, SmoothedGlued};
use crate::verifier::certify::{certify, CurvatureCertificate};

/// Boundary margins down to `-BOUNDARY_SLACK` count as semidefinite.
const BOUNDARY_SLACK: f64 = 1e-12;

/// Halving schedule for the gluing width and the smoothing band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchSchedule {
    /// First gluing half-width. Defaults to half the shallower collar depth,
    /// capped so that the outer margin `iota` still fits.
    pub eps_max: Option<f64>,
    pub eps_min: f64,
    pub nu_min: f64,
}

impl Default for SearchSchedule {
    fn default() -> Self {
        SearchSchedule {
            eps_max: None,
            eps_min: 1e-3,
            nu_min: 1e-5,
        }
    }
}

impl SearchSchedule {
    pub fn first_eps(&self, h1: &CollarMetric, h2: &CollarMetric, iota: f64) -> f64 {
        let depth = h1.depth().min(h2.depth());
        self.eps_max.unwrap_or((0.5 * depth).min(depth - iota))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    /// Certifying the C1 spline metric.
    C1,
    /// Certifying the mollified metric.
    Smooth,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchAttempt {
    pub stage: Stage,
    pub eps: f64,
    pub nu: Option<f64>,
    pub min_value: Option<f64>,
    pub passed: bool,
    /// Error raised while building or certifying this candidate.
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SearchOutcome {
    Certified {
        params: GluingParams,
        delta: f64,
        certificate: Box<CurvatureCertificate>,
    },
    /// The schedule ran out before a certificate passed. This is not a
    /// refutation: the gluing statements only assert existence of some
    /// small enough width.
    Inconclusive { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub mode: CurvatureMode,
    pub k: usize,
    pub kappa: f64,
    pub boundary: Option<BoundaryReport>,
    pub outcome: SearchOutcome,
    pub trace: Vec<SearchAttempt>,
}

impl SearchReport {
    pub fn certified(&self) -> Option<(&GluingParams, &CurvatureCertificate)> {
        match &self.outcome {
            SearchOutcome::Certified { params, certificate, .. } => Some((params, certificate)),
            SearchOutcome::Inconclusive { .. } => None,
        }
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self.outcome, SearchOutcome::Inconclusive { .. })
    }
}

/// Rebuilds the smoothed metric for parameters returned by a search.
pub fn rebuild(h1: &CollarMetric, h2: &CollarMetric, params: &GluingParams) -> Result<SmoothedGlued> {
    smooth_glued(&assemble_glued(h1, h2, params)?, params.nu, params.mu)
}

/// Halves `eps` from the schedule's first value until the C1 metric is
/// certified, then halves the smoothing band `nu` (starting from
/// `min(params.nu, eps/2, iota/2)`) until the smoothed metric is certified.
/// If no band works the search moves on to the next `eps`.
///
/// The boundary condition must hold strictly for `kappa >= 0`; for negative
/// `kappa` a semidefinite `h1'(0) - h2'(0)` is accepted.
#[allow(clippy::too_many_arguments)]
pub fn epsilon_nu_search(
    h1: &CollarMetric,
    h2: &CollarMetric,
    mode: CurvatureMode,
    k: usize,
    kappa: f64,
    params: &GluingParams,
    schedule: &SearchSchedule,
    plan: &SamplingPlan,
) -> Result<SearchReport> {
    let mut report = SearchReport {
        mode,
        k,
        kappa,
        boundary: None,
        outcome: SearchOutcome::Inconclusive { reason: String::new() },
        trace: vec![],
    };
    let boundary = boundary_condition_check(h1, h2, mode, k, &plan.section_nodes(h1.section()))?;
    let acceptable = boundary.satisfied || (kappa < 0.0 && boundary.margin >= -BOUNDARY_SLACK);
    report.boundary = Some(boundary.clone());
    if !acceptable {
        report.outcome = SearchOutcome::Inconclusive {
            reason: format!(
                "boundary condition for {} (k = {k}) is not strict: margin {:e} at x = {:?}",
                mode.name(),
                boundary.margin,
                boundary.witness_x
            ),
        };
        return Ok(report);
    }
    if !(schedule.eps_min > 0.0 && schedule.nu_min > 0.0) {
        return Err(GlueError::InvalidInput("search floors must be positive".into()));
    }
    let mut eps = schedule.first_eps(h1, h2, params.iota);
    while eps >= schedule.eps_min {
        let p = GluingParams { eps, ..*params };
        let attempt = |stage, nu, min_value, passed, note| SearchAttempt {
            stage,
            eps,
            nu,
            min_value,
            passed,
            note,
        };
        let c1 = assemble_glued(h1, h2, &p).and_then(|g| Ok((certify(&g, mode, k, kappa, plan)?, g)));
        let (cert, glued) = match c1 {
            Ok(v) => v,
            Err(e) => {
                report.trace.push(attempt(Stage::C1, None, None, false, Some(e.to_string())));
                eps *= 0.5;
                continue;
            }
        };
        report.trace.push(attempt(Stage::C1, None, Some(cert.min_value), cert.passed, None));
        if cert.passed {
            let mut nu = p.nu.min(0.5 * eps).min(0.5 * p.iota);
            while nu >= schedule.nu_min {
                let smoothed = smooth_glued(&glued, nu, p.mu)
                    .and_then(|s| Ok((certify(&s, mode, k, kappa, plan)?, s.report().delta)));
                match smoothed {
                    Ok((cert, delta)) => {
                        report
                            .trace
                            .push(attempt(Stage::Smooth, Some(nu), Some(cert.min_value), cert.passed, None));
                        if cert.passed {
                            report.outcome = SearchOutcome::Certified {
                                params: GluingParams { nu, ..p },
                                delta,
                                certificate: Box::new(cert),
                            };
                            return Ok(report);
                        }
                    }
                    Err(e) => report
                        .trace
                        .push(attempt(Stage::Smooth, Some(nu), None, false, Some(e.to_string()))),
                }
                nu *= 0.5;
            }
        }
        eps *= 0.5;
    }
    report.outcome = SearchOutcome::Inconclusive {
        reason: format!(
            "no certified metric for eps down to {:e} (nu down to {:e})",
            schedule.eps_min, schedule.nu_min
        ),
    };
    Ok(report)
}
