use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::curvature::{CurvatureMode, SamplingPlan};
use crate::error::{GlueError, Result};
use crate::gluing::GluingParams;
use crate::metric::{CollarChart, CollarMetric, CrossSection, SliceFamily};
use crate::verifier::diameter::{diameter_estimate, DiameterEstimate};
use crate::verifier::search::{epsilon_nu_search, rebuild, SearchReport, SearchSchedule};

/// Collar minima down to `-COLLAR_TOL` count as non-negative.
const COLLAR_TOL: f64 = 1e-9;

/// The C0 metric `h1 on t <= 0, h2 on t > 0`.
struct C0Glued<'a> {
    h1: &'a CollarMetric,
    h2: &'a CollarMetric,
}

impl SliceFamily for C0Glued<'_> {
    fn section(&self) -> &CrossSection {
        self.h1.section()
    }

    fn t_range(&self) -> (f64, f64) {
        (self.h1.interval().0, self.h2.interval().1)
    }

    fn profile(&self, t: f64, order: usize) -> DMatrix<f64> {
        if t <= 0.0 {
            self.h1.profile(t, order)
        } else {
            self.h2.profile(t, order)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlmostNonnegReport {
    pub delta: f64,
    /// Collar coordinate range `[-reach, reach]` on which diameters are taken.
    pub reach: f64,
    /// Sampled minima of the functional on the two collars.
    pub collar_minima: [f64; 2],
    /// Set when a collar is not non-negative on the grid.
    pub precondition_violation: Option<String>,
    /// Diameter of the C0 glued metric and the lower bound `-delta / 2d^2`.
    pub c0_diameter: Option<DiameterEstimate>,
    pub kappa: Option<f64>,
    pub search: Option<SearchReport>,
    pub smooth_diameter: Option<DiameterEstimate>,
    /// `min curvature * diam(g)^2` of the certified metric.
    pub scaled_minimum: Option<f64>,
    pub passed: bool,
    pub inconclusive: bool,
}

fn collar_minimum(h: &CollarMetric, mode: CurvatureMode, k: usize, plan: &SamplingPlan) -> Result<f64> {
    Ok(match mode {
        CurvatureMode::RicK => crate::curvature::ric_k_min(&h.chart(), k, plan)?.value,
        CurvatureMode::ScK => crate::curvature::sc_k_min(&h.chart(), k, plan)?.value,
    })
}

/// Runs the gluing with the lower bound `kappa = -delta / 2d^2`, where `d`
/// is the diameter of the C0 glued metric, and checks
/// `min curvature * diam(g)^2 >= -delta` for the certified smooth metric.
///
/// Only the collar neighbourhood `X x [-reach, reach]` is modelled, with
/// `reach` the shallower collar depth, so both diameters are taken there.
#[allow(clippy::too_many_arguments)]
pub fn almost_nonneg_check(
    h1: &CollarMetric,
    h2: &CollarMetric,
    mode: CurvatureMode,
    k: usize,
    delta: f64,
    params: &GluingParams,
    schedule: &SearchSchedule,
    plan: &SamplingPlan,
    diameter_nodes: usize,
) -> Result<AlmostNonnegReport> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(GlueError::InvalidInput(format!("delta must be positive, got {delta}")));
    }
    let reach = h1.depth().min(h2.depth());
    let collar_minima = [collar_minimum(h1, mode, k, plan)?, collar_minimum(h2, mode, k, plan)?];
    let mut report = AlmostNonnegReport {
        delta,
        reach,
        collar_minima,
        precondition_violation: None,
        c0_diameter: None,
        kappa: None,
        search: None,
        smooth_diameter: None,
        scaled_minimum: None,
        passed: false,
        inconclusive: false,
    };
    if let Some(i) = collar_minima.iter().position(|&m| m < -COLLAR_TOL) {
        report.precondition_violation = Some(format!(
            "collar {} has sampled {} minimum {:e} < 0",
            i + 1,
            mode.name(),
            collar_minima[i]
        ));
        return Ok(report);
    }
    let c0 = C0Glued { h1, h2 };
    let d0 = diameter_estimate(&CollarChart::with_t_range(&c0, -reach, reach), diameter_nodes)?;
    let kappa = -delta / (2.0 * d0.diameter * d0.diameter);
    report.c0_diameter = Some(d0);
    report.kappa = Some(kappa);
    let search = epsilon_nu_search(h1, h2, mode, k, kappa, params, schedule, plan)?;
    if let Some((p, cert)) = search.certified() {
        let s = rebuild(h1, h2, p)?;
        let d = diameter_estimate(&CollarChart::with_t_range(&s, -reach, reach), diameter_nodes)?;
        let scaled = cert.min_value * d.diameter * d.diameter;
        report.passed = scaled >= -delta;
        report.scaled_minimum = Some(scaled);
        report.smooth_diameter = Some(d);
    } else {
        report.inconclusive = true;
    }
    report.search = Some(search);
    Ok(report)
}
