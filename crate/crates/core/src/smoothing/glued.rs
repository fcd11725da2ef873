use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{GlueError, Result};
use crate::gluing::{GluedMetric, Region};
use crate::metric::{CollarChart, CrossSection, SliceFamily};
use crate::smoothing::band::{search_radius, Band, BandContract, Jet};

/// Relative tolerance under which the two pieces at a junction count as
/// the same smooth function.
const IDENTITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothingReport {
    pub nu: f64,
    pub mu: f64,
    /// Shared kernel radius (0 when neither junction needed smoothing).
    pub delta: f64,
    /// Contract measured on the profile entries at `t = -eps` and `t = eps`
    /// (absent for a junction whose pieces already agree).
    pub bands: [Option<BandContract>; 2],
    /// C1 distance bound for the metric coefficients at every x.
    pub c1_distance: f64,
    /// Change of the kernel convolutions under the doubled quadrature rule.
    pub quadrature_change: f64,
    /// Change of the smoothed coefficients and their first two derivatives
    /// under the doubled rule (includes cutoff-amplified rounding).
    pub smoothed_change: f64,
}

/// The glued metric with both junctions at `t = -+eps` mollified.
#[derive(Debug, Clone)]
pub struct SmoothedGlued {
    glued: GluedMetric,
    bands: [Option<Band>; 2],
    report: SmoothingReport,
}

fn junction_is_smooth(g: &GluedMetric, t0: f64) -> bool {
    (0..=4).all(|k| {
        let l = g.one_sided_profile(t0, k, true);
        let r = g.one_sided_profile(t0, k, false);
        let scale = l.amax().max(r.amax()).max(1.0);
        (l - r).amax() <= IDENTITY_TOL * scale
    })
}

/// Smooths the C1 glued metric on the bands `[-+eps - nu, -+eps + nu]`.
///
/// Both bands share one kernel radius, so a mirror-symmetric input stays
/// mirror-symmetric. Coefficients are `P(t) sigma(x)` with `|sigma| <= 1`,
/// so meeting the budget on the profile entries meets it at every x.
pub fn smooth_glued(gm: &GluedMetric, nu: f64, mu: f64) -> Result<SmoothedGlued> {
    let p = gm.params();
    let limit = p.eps.min(p.iota);
    if !(nu > 0.0) || nu >= limit {
        return Err(GlueError::BandTooWide { nu, limit });
    }
    if !(mu > 0.0) {
        return Err(GlueError::InvalidInput(format!("mu must be positive, got {mu}")));
    }
    let scale = gm.section().coefficient_bound();
    let budget = mu / scale;
    let junctions = [-p.eps, p.eps];
    let active: Vec<f64> = junctions.iter().copied().filter(|&t0| !junction_is_smooth(gm, t0)).collect();
    let jet = |t: f64| -> Jet { gm.profile_jet(t) };
    let (delta, contracts) = if active.is_empty() {
        (0.0, vec![])
    } else {
        search_radius(&active, nu, budget, &jet)?
    };
    let mut bands = [None, None];
    let mut band_reports = [None, None];
    let mut it = contracts.into_iter();
    for (i, &t0) in junctions.iter().enumerate() {
        if active.contains(&t0) {
            bands[i] = Some(Band::new(t0, nu, delta));
            band_reports[i] = it.next();
        }
    }
    let quadrature_change = bands
        .iter()
        .flatten()
        .map(|b| b.quadrature_change(&jet))
        .fold(0.0, f64::max);
    let smoothed_change = bands
        .iter()
        .flatten()
        .map(|b| b.smoothed_change(&jet))
        .fold(0.0, f64::max);
    let c1_distance = band_reports.iter().flatten().map(|c| c.c1_distance * scale).fold(0.0, f64::max);
    let out = SmoothedGlued {
        glued: gm.clone(),
        bands,
        report: SmoothingReport {
            nu,
            mu,
            delta,
            bands: band_reports,
            c1_distance,
            quadrature_change,
            smoothed_change,
        },
    };
    out.check_definite()?;
    Ok(out)
}

impl SmoothedGlued {
    pub fn glued(&self) -> &GluedMetric {
        &self.glued
    }

    pub fn report(&self) -> &SmoothingReport {
        &self.report
    }

    pub fn nu(&self) -> f64 {
        self.report.nu
    }

    fn band_at(&self, t: f64) -> Option<&Band> {
        self.bands.iter().flatten().find(|b| b.contains(t))
    }

    /// Region of `t`, with the smoothing bands carved out of their
    /// neighbours.
    pub fn region(&self, t: f64) -> Region {
        let e = self.glued.eps();
        let nu = self.report.nu;
        if (t + e).abs() < nu {
            Region::Band1
        } else if (t - e).abs() < nu {
            Region::Band2
        } else {
            self.glued.region(t)
        }
    }

    /// The smoothed metric is positive definite across both bands (checked
    /// at the centre of the cross-section chart; `sigma` only rescales).
    fn check_definite(&self) -> Result<()> {
        let d = self.section().domain();
        let x: Vec<f64> = (0..d.dim()).map(|i| d.axis_nodes(i, 1)[0]).collect();
        for b in self.bands.iter().flatten() {
            for t in b.grid() {
                if !self.value(&x, t).is_positive_definite() {
                    let mut coords = x.clone();
                    coords.push(t);
                    return Err(GlueError::NotPositiveDefinite { coords });
                }
            }
        }
        Ok(())
    }

    pub fn chart(&self) -> CollarChart<&SmoothedGlued> {
        CollarChart::new(self)
    }
}

impl SliceFamily for SmoothedGlued {
    fn section(&self) -> &CrossSection {
        self.glued.section()
    }

    fn t_range(&self) -> (f64, f64) {
        self.glued.t_range()
    }

    fn profile(&self, t: f64, order: usize) -> DMatrix<f64> {
        match self.band_at(t) {
            None => self.glued.profile(t, order),
            Some(b) if order <= 2 => {
                let mut j = b.jet(&|s| self.glued.profile_jet(s), t);
                j.swap(0, order);
                let [v, _, _] = j;
                v
            }
            Some(b) => {
                let s = 1e-3 * b.delta;
                (self.profile(t + s, order - 1) - self.profile(t - s, order - 1)) / (2.0 * s)
            }
        }
    }

    fn profile_jet(&self, t: f64) -> [DMatrix<f64>; 3] {
        match self.band_at(t) {
            None => self.glued.profile_jet(t),
            Some(b) => b.jet(&|s| self.glued.profile_jet(s), t),
        }
    }
}
