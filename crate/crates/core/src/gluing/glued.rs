use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gluing::params::GluingParams;
use crate::gluing::spline::{spline_family, SplineFamily};
use crate::metric::{CollarChart, CollarMetric, CrossSection, SliceFamily};

/// The pieces of a glued metric along the collar coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    H1,
    Band1,
    Spline,
    Band2,
    H2,
}

impl Region {
    pub fn name(self) -> &'static str {
        match self {
            Region::H1 => "h1",
            Region::Band1 => "band1",
            Region::Spline => "spline",
            Region::Band2 => "band2",
            Region::H2 => "h2",
        }
    }
}

/// `dt^2 + h1(t)` on `[-eps-iota, -eps]`, `dt^2 + g_t` on `[-eps, eps]` and
/// `dt^2 + h2(t)` on `[eps, eps+iota]`.
#[derive(Debug, Clone)]
pub struct GluedMetric {
    spline: SplineFamily,
    params: GluingParams,
}

/// Assembles the C1 glued metric. The collars must cover
/// `[-eps-iota, 0]` and `[0, eps+iota]` respectively.
pub fn assemble_glued(h1: &CollarMetric, h2: &CollarMetric, params: &GluingParams) -> Result<GluedMetric> {
    let (eps, iota) = (params.eps, params.iota);
    h1.require_cover(-eps - iota, 0.0)?;
    h2.require_cover(0.0, eps + iota)?;
    let spline = spline_family(h1, h2, eps)?;
    Ok(GluedMetric {
        spline,
        params: *params,
    })
}

impl GluedMetric {
    pub fn params(&self) -> &GluingParams {
        &self.params
    }

    pub fn eps(&self) -> f64 {
        self.params.eps
    }

    pub fn spline(&self) -> &SplineFamily {
        &self.spline
    }

    pub fn h1(&self) -> &CollarMetric {
        self.spline.h1()
    }

    pub fn h2(&self) -> &CollarMetric {
        self.spline.h2()
    }

    /// Region of `t` before any smoothing (interfaces belong to the spline).
    pub fn region(&self, t: f64) -> Region {
        let e = self.eps();
        if t < -e {
            Region::H1
        } else if t > e {
            Region::H2
        } else {
            Region::Spline
        }
    }

    /// Profile of the piece owning `t`, taking the left piece at an
    /// interface when `from_left` is set.
    pub fn one_sided_profile(&self, t: f64, order: usize, from_left: bool) -> DMatrix<f64> {
        let e = self.eps();
        let left_of = |edge: f64| t < edge || (t == edge && from_left);
        if left_of(-e) {
            self.h1().profile(t, order)
        } else if left_of(e) {
            self.spline.profile(t, order)
        } else {
            self.h2().profile(t, order)
        }
    }

    /// Largest entry jump of the `order`-th t-derivative of the profile
    /// across `t = -eps` and `t = eps`. Slice metrics are the profile times a
    /// section form bounded by the section's coefficient bound.
    pub fn interface_jump(&self, order: usize) -> f64 {
        let e = self.eps();
        [-e, e]
            .iter()
            .map(|&t| (self.one_sided_profile(t, order, true) - self.one_sided_profile(t, order, false)).amax())
            .fold(0.0, f64::max)
    }

    pub fn chart(&self) -> CollarChart<&GluedMetric> {
        CollarChart::new(self)
    }
}

impl SliceFamily for GluedMetric {
    fn section(&self) -> &CrossSection {
        self.spline.section()
    }

    fn t_range(&self) -> (f64, f64) {
        let r = self.params.eps + self.params.iota;
        (-r, r)
    }

    fn profile(&self, t: f64, order: usize) -> DMatrix<f64> {
        match self.region(t) {
            Region::H1 => self.h1().profile(t, order),
            Region::H2 => self.h2().profile(t, order),
            _ => self.spline.profile(t, order),
        }
    }
}
