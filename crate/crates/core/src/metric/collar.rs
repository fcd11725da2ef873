use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{GlueError, Result};
use crate::metric::chart::{Chart, Domain, MetricJet};
use crate::metric::section::CrossSection;
use crate::metric::sym_form::SymForm;
use crate::scalar::{ScalarFn, SmoothFn};

/// Which half-line of the collar coordinate a collar occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `t <= 0`: the first manifold, `t` increasing toward its boundary.
    Left,
    /// `t >= 0`: the second manifold, `t` increasing away from its boundary.
    Right,
    /// The interval straddles `t = 0`; usable on either side.
    Both,
}

/// A one-parameter family `t -> g_t` of metrics on the cross-section, given
/// as an entrywise product of a t-profile `P(t)` with the section's
/// reference form.
pub trait SliceFamily: Send + Sync {
    fn section(&self) -> &CrossSection;

    fn t_range(&self) -> (f64, f64);

    /// `order`-th t-derivative of the profile (orders 0..=2 are required).
    fn profile(&self, t: f64, order: usize) -> DMatrix<f64>;

    fn profile_jet(&self, t: f64) -> [DMatrix<f64>; 3] {
        [self.profile(t, 0), self.profile(t, 1), self.profile(t, 2)]
    }

    fn value(&self, x: &[f64], t: f64) -> SymForm {
        SymForm::from_matrix_unchecked(self.profile(t, 0).component_mul(&self.section().sigma(x)))
    }

    /// `d/dt` of the slice metric.
    fn d1(&self, x: &[f64], t: f64) -> SymForm {
        SymForm::from_matrix_unchecked(self.profile(t, 1).component_mul(&self.section().sigma(x)))
    }

    fn d2(&self, x: &[f64], t: f64) -> SymForm {
        SymForm::from_matrix_unchecked(self.profile(t, 2).component_mul(&self.section().sigma(x)))
    }
}

impl<F: SliceFamily + ?Sized> SliceFamily for &F {
    fn section(&self) -> &CrossSection {
        (**self).section()
    }
    fn t_range(&self) -> (f64, f64) {
        (**self).t_range()
    }
    fn profile(&self, t: f64, order: usize) -> DMatrix<f64> {
        (**self).profile(t, order)
    }
    fn profile_jet(&self, t: f64) -> [DMatrix<f64>; 3] {
        (**self).profile_jet(t)
    }
}

impl<F: SliceFamily + ?Sized> SliceFamily for std::sync::Arc<F> {
    fn section(&self) -> &CrossSection {
        (**self).section()
    }
    fn t_range(&self) -> (f64, f64) {
        (**self).t_range()
    }
    fn profile(&self, t: f64, order: usize) -> DMatrix<f64> {
        (**self).profile(t, order)
    }
    fn profile_jet(&self, t: f64) -> [DMatrix<f64>; 3] {
        (**self).profile_jet(t)
    }
}

/// Collar metric `h(t) = W(t) sigma W(t)` with `W = diag(w_1, ..., w_{n-1})`.
///
/// Warped products over a round sphere use one warp for every coordinate;
/// diagonal torus collars use one warp per circle factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollarMetric {
    section: CrossSection,
    warps: Vec<ScalarFn>,
    interval: (f64, f64),
}

const POSITIVITY_SAMPLES: usize = 1000;

fn check_positive(f: &ScalarFn, interval: (f64, f64), what: &str) -> Result<()> {
    for i in 0..=POSITIVITY_SAMPLES {
        let t = interval.0 + (interval.1 - interval.0) * i as f64 / POSITIVITY_SAMPLES as f64;
        let v = f.value(t);
        if !(v > 0.0) {
            return Err(GlueError::InvalidInput(format!(
                "{what} must be positive on [{}, {}], got {v} at t = {t}",
                interval.0, interval.1
            )));
        }
    }
    Ok(())
}

impl CollarMetric {
    pub fn multiply_warped(section: CrossSection, warps: Vec<ScalarFn>, interval: (f64, f64)) -> Result<Self> {
        if warps.len() != section.dim() {
            return Err(GlueError::DimensionMismatch(format!(
                "{} warps for a {}-dimensional cross-section",
                warps.len(),
                section.dim()
            )));
        }
        if !(interval.0 < interval.1) || !interval.0.is_finite() || !interval.1.is_finite() {
            return Err(GlueError::InvalidInput(format!("bad interval {interval:?}")));
        }
        for w in &warps {
            check_positive(w, interval, "warping function")?;
        }
        Ok(CollarMetric {
            section,
            warps,
            interval,
        })
    }

    /// `dt^2 + phi(t)^2 ds^2_{S^{n-1}}` on `interval`.
    pub fn warped_product(phi: ScalarFn, n: usize, interval: (f64, f64)) -> Result<Self> {
        if n < 3 {
            return Err(GlueError::InvalidInput(format!("warped products need n >= 3, got {n}")));
        }
        Self::multiply_warped(CrossSection::round_sphere(n - 1), vec![phi; n - 1], interval)
    }

    /// `dt^2 + sum_j a_j(t)^2 dx_j^2` on a unit flat torus.
    pub fn diagonal_torus(a: Vec<ScalarFn>, interval: (f64, f64)) -> Result<Self> {
        if a.is_empty() {
            return Err(GlueError::InvalidInput("torus collar needs at least one factor".into()));
        }
        Self::multiply_warped(CrossSection::unit_torus(a.len()), a, interval)
    }

    /// The collar seen through `t -> -t`, occupying the opposite side.
    pub fn mirror(&self) -> Self {
        CollarMetric {
            section: self.section.clone(),
            warps: self.warps.iter().map(ScalarFn::reflect).collect(),
            interval: (-self.interval.1, -self.interval.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.section.dim() + 1
    }

    pub fn warps(&self) -> &[ScalarFn] {
        &self.warps
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn side(&self) -> Side {
        let (lo, hi) = self.interval;
        if hi <= 0.0 {
            Side::Left
        } else if lo >= 0.0 {
            Side::Right
        } else {
            Side::Both
        }
    }

    /// Distance the collar extends from `t = 0` into its own side.
    pub fn depth(&self) -> f64 {
        match self.side() {
            Side::Left => -self.interval.0,
            Side::Right => self.interval.1,
            Side::Both => (-self.interval.0).min(self.interval.1),
        }
    }

    /// Checks that the collar is defined on `[lo, hi]`.
    pub fn require_cover(&self, lo: f64, hi: f64) -> Result<()> {
        const SLACK: f64 = 1e-12;
        if self.interval.0 > lo + SLACK || self.interval.1 < hi - SLACK {
            return Err(GlueError::CollarTooShallow {
                lo: self.interval.0,
                hi: self.interval.1,
                need_lo: lo,
                need_hi: hi,
            });
        }
        Ok(())
    }

    pub fn chart(&self) -> CollarChart<&CollarMetric> {
        CollarChart::new(self)
    }
}

impl SliceFamily for CollarMetric {
    fn section(&self) -> &CrossSection {
        &self.section
    }

    fn t_range(&self) -> (f64, f64) {
        self.interval
    }

    fn profile(&self, t: f64, order: usize) -> DMatrix<f64> {
        let m = self.warps.len();
        let derivs: Vec<Vec<f64>> = self
            .warps
            .iter()
            .map(|w| (0..=order).map(|k| w.deriv(t, k)).collect())
            .collect();
        let mut binom = vec![1.0; order + 1];
        for j in 1..=order {
            binom[j] = binom[j - 1] * (order - j + 1) as f64 / j as f64;
        }
        DMatrix::from_fn(m, m, |i, j| {
            (0..=order)
                .map(|l| binom[l] * derivs[i][l] * derivs[j][order - l])
                .sum()
        })
    }
}

/// The chart `dt^2 + g_t` on `X x [t_lo, t_hi]` with closed-form jets.
/// Coordinates are `(x_1, ..., x_{n-1}, t)`.
pub struct CollarChart<F> {
    family: F,
    domain: Domain,
}

impl<F: SliceFamily> CollarChart<F> {
    pub fn new(family: F) -> Self {
        let section_domain = family.section().domain();
        let (lo, hi) = family.t_range();
        let mut domain = section_domain;
        domain.lower.push(lo);
        domain.upper.push(hi);
        domain.periodic.push(false);
        CollarChart { family, domain }
    }

    /// Same family, chart restricted or extended to another t-range.
    pub fn with_t_range(family: F, lo: f64, hi: f64) -> Self {
        let mut ch = Self::new(family);
        ch.domain = ch.domain.with_t_range(lo, hi);
        ch
    }

    pub fn family(&self) -> &F {
        &self.family
    }
}

fn embed(block: &DMatrix<f64>, n: usize, tt: f64) -> DMatrix<f64> {
    let m = n - 1;
    let mut g = DMatrix::zeros(n, n);
    g.view_mut((0, 0), (m, m)).copy_from(block);
    g[(m, m)] = tt;
    g
}

impl<F: SliceFamily> Chart for CollarChart<F> {
    fn dim(&self) -> usize {
        self.family.section().dim() + 1
    }

    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn metric_at(&self, coords: &[f64]) -> DMatrix<f64> {
        let n = self.dim();
        let (x, t) = coords.split_at(n - 1);
        let block = self.family.value(x, t[0]).into_matrix();
        embed(&block, n, 1.0)
    }

    fn jet_at(&self, coords: &[f64]) -> MetricJet {
        let n = self.dim();
        let m = n - 1;
        let (x, t) = coords.split_at(m);
        let sj = self.family.section().jet(x);
        let [p0, p1, p2] = self.family.profile_jet(t[0]);
        let g = embed(&p0.component_mul(&sj.sigma), n, 1.0);
        let mut dg = Vec::with_capacity(n);
        for a in 0..m {
            dg.push(embed(&p0.component_mul(&sj.d[a]), n, 0.0));
        }
        dg.push(embed(&p1.component_mul(&sj.sigma), n, 0.0));
        let mut ddg = vec![vec![DMatrix::zeros(n, n); n]; n];
        for a in 0..m {
            for b in 0..m {
                ddg[a][b] = embed(&p0.component_mul(&sj.dd[a][b]), n, 0.0);
            }
            let mixed = embed(&p1.component_mul(&sj.d[a]), n, 0.0);
            ddg[m][a] = mixed.clone();
            ddg[a][m] = mixed;
        }
        ddg[m][m] = embed(&p2.component_mul(&sj.sigma), n, 0.0);
        MetricJet { g, dg, ddg }
    }
}

/// Intrinsic metric `g_t` of a single slice `X x {t}` as an `(n-1)`-chart.
pub struct SliceChart<'a, F> {
    family: &'a F,
    profile: [DMatrix<f64>; 3],
    domain: Domain,
}

impl<'a, F: SliceFamily> SliceChart<'a, F> {
    pub fn new(family: &'a F, t: f64) -> Self {
        SliceChart {
            family,
            profile: family.profile_jet(t),
            domain: family.section().domain(),
        }
    }
}

impl<F: SliceFamily> Chart for SliceChart<'_, F> {
    fn dim(&self) -> usize {
        self.family.section().dim()
    }

    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn metric_at(&self, coords: &[f64]) -> DMatrix<f64> {
        self.profile[0].component_mul(&self.family.section().sigma(coords))
    }

    fn jet_at(&self, coords: &[f64]) -> MetricJet {
        let sj = self.family.section().jet(coords);
        let p = &self.profile[0];
        MetricJet {
            g: p.component_mul(&sj.sigma),
            dg: sj.d.iter().map(|d| p.component_mul(d)).collect(),
            ddg: sj
                .dd
                .iter()
                .map(|row| row.iter().map(|d| p.component_mul(d)).collect())
                .collect(),
        }
    }
}
