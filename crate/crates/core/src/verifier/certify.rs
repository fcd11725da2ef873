use serde::{Deserialize, Serialize};

use crate::curvature::{points_on, CurvatureMin, CurvatureMode, SamplingPlan};
use crate::error::{GlueError, Result};
use crate::gluing::{GluedMetric, Region};
use crate::metric::{CollarChart, Point, SliceFamily};
use crate::smoothing::SmoothedGlued;

/// Relative tolerance for re-evaluating a certificate's witness.
pub const WITNESS_TOL: f64 = 1e-9;

/// One t-interval of a glued metric and the family that owns it there.
pub struct RegionPiece<'a> {
    pub region: Region,
    pub lo: f64,
    pub hi: f64,
    pub family: &'a dyn SliceFamily,
}

/// A slice family that splits into regions along the collar coordinate.
/// Curvature in each region is evaluated with that region's own family, so
/// second-derivative jumps at region boundaries are seen from both sides.
pub trait Regioned: SliceFamily {
    /// Regions in increasing `t`, covering the whole t-range.
    fn regions(&self) -> Vec<RegionPiece<'_>>;
}

impl Regioned for GluedMetric {
    fn regions(&self) -> Vec<RegionPiece<'_>> {
        let e = self.eps();
        let r = e + self.params().iota;
        vec![
            RegionPiece { region: Region::H1, lo: -r, hi: -e, family: self.h1() },
            RegionPiece { region: Region::Spline, lo: -e, hi: e, family: self.spline() },
            RegionPiece { region: Region::H2, lo: e, hi: r, family: self.h2() },
        ]
    }
}

impl Regioned for SmoothedGlued {
    fn regions(&self) -> Vec<RegionPiece<'_>> {
        let g = self.glued();
        let e = g.eps();
        let nu = self.nu();
        let r = e + g.params().iota;
        vec![
            RegionPiece { region: Region::H1, lo: -r, hi: -e - nu, family: g.h1() },
            RegionPiece { region: Region::Band1, lo: -e - nu, hi: -e + nu, family: self },
            RegionPiece { region: Region::Spline, lo: -e + nu, hi: e - nu, family: g.spline() },
            RegionPiece { region: Region::Band2, lo: e - nu, hi: e + nu, family: self },
            RegionPiece { region: Region::H2, lo: e + nu, hi: r, family: g.h2() },
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionMinimum {
    pub region: Region,
    pub t_range: (f64, f64),
    pub points: usize,
    pub min_value: f64,
    pub witness: CurvatureMin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingMetadata {
    pub plan: SamplingPlan,
    pub x_nodes: usize,
    pub t_nodes_per_region: usize,
    pub points: usize,
}

/// Grid evidence that `Ric_k > kappa` (or `Sc_k > kappa`) on a glued metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureCertificate {
    pub mode: CurvatureMode,
    pub k: usize,
    pub kappa: f64,
    /// Smallest sampled value, in units of 1/length^2.
    pub min_value: f64,
    pub passed: bool,
    pub witness_region: Region,
    pub witness: CurvatureMin,
    /// The functional re-evaluated at the witness through an independent
    /// code path.
    pub reproduced_value: f64,
    pub sampling: SamplingMetadata,
    pub regions: Vec<RegionMinimum>,
}

impl CurvatureCertificate {
    pub fn margin(&self) -> f64 {
        self.min_value - self.kappa
    }

    pub fn region(&self, region: Region) -> Option<&RegionMinimum> {
        self.regions.iter().find(|r| r.region == region)
    }
}

/// `count` equispaced nodes on `[lo, hi]`, endpoints included.
pub(crate) fn interval_nodes(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![0.5 * (lo + hi)],
        _ => (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect(),
    }
}

fn region_chart<'a>(piece: &RegionPiece<'a>) -> CollarChart<&'a dyn SliceFamily> {
    CollarChart::with_t_range(piece.family, piece.lo, piece.hi)
}

/// Minimum of the chosen curvature functional over every region of `g`.
///
/// Each region gets the plan's cross-section nodes times `t_count`
/// equispaced t-values (endpoints included). The overall minimum is the
/// first strict minimum over the regions in t-order.
pub fn certify<G: Regioned + ?Sized>(
    g: &G,
    mode: CurvatureMode,
    k: usize,
    kappa: f64,
    plan: &SamplingPlan,
) -> Result<CurvatureCertificate> {
    let n = g.section().dim() + 1;
    mode.check_k(k, n)?;
    if !kappa.is_finite() {
        return Err(GlueError::InvalidInput(format!("kappa must be finite, got {kappa}")));
    }
    let xs = plan.section_nodes(g.section());
    let pieces = g.regions();
    let mut regions = Vec::with_capacity(pieces.len());
    for piece in &pieces {
        let ch = region_chart(piece);
        let pts: Vec<Point> = points_on(&xs, &interval_nodes(piece.lo, piece.hi, plan.t_count));
        let w = mode.min_over(&ch, k, &pts, plan)?;
        regions.push(RegionMinimum {
            region: piece.region,
            t_range: (piece.lo, piece.hi),
            points: pts.len(),
            min_value: w.value,
            witness: w,
        });
    }
    let best = regions
        .iter()
        .enumerate()
        .fold(None::<usize>, |b, (i, r)| match b {
            Some(j) if regions[j].min_value <= r.min_value => Some(j),
            _ => Some(i),
        })
        .ok_or(GlueError::EmptySampling)?;
    let ch = region_chart(&pieces[best]);
    let witness = regions[best].witness.clone();
    let reproduced_value = mode.value_at(&ch, &witness, k)?;
    let min_value = regions[best].min_value;
    if (reproduced_value - min_value).abs() > WITNESS_TOL * min_value.abs().max(1.0) {
        return Err(GlueError::InvalidInput(format!(
            "witness does not reproduce: {min_value} vs {reproduced_value}"
        )));
    }
    let points = regions.iter().map(|r| r.points).sum();
    Ok(CurvatureCertificate {
        mode,
        k,
        kappa,
        min_value,
        passed: min_value > kappa,
        witness_region: regions[best].region,
        witness,
        reproduced_value,
        sampling: SamplingMetadata {
            plan: plan.clone(),
            x_nodes: xs.len(),
            t_nodes_per_region: plan.t_count,
            points,
        },
        regions,
    })
}
