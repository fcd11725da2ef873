use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{GlueError, Result};
use crate::metric::sym_form::asymmetry;

/// A chart point `(x_1, ..., x_{n-1}, t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: Vec<f64>,
    pub t: f64,
}

impl Point {
    pub fn new(x: Vec<f64>, t: f64) -> Self {
        Point { x, t }
    }

    /// All chart coordinates with `t` last.
    pub fn coords(&self) -> Vec<f64> {
        let mut c = self.x.clone();
        c.push(self.t);
        c
    }

    pub fn from_coords(coords: &[f64]) -> Self {
        let (t, x) = coords.split_last().expect("non-empty coordinates");
        Point { x: x.to_vec(), t: *t }
    }
}

/// Coordinate box of a chart. Periodic coordinates wrap with `upper - lower`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub periodic: Vec<bool>,
}

impl Domain {
    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, coords: &[f64]) -> bool {
        const SLACK: f64 = 1e-12;
        coords.len() == self.dim()
            && coords.iter().all(|c| c.is_finite())
            && (0..self.dim()).all(|i| {
                self.periodic[i] || (coords[i] >= self.lower[i] - SLACK && coords[i] <= self.upper[i] + SLACK)
            })
    }

    pub fn with_t_range(&self, lo: f64, hi: f64) -> Domain {
        let mut d = self.clone();
        let last = d.dim() - 1;
        d.lower[last] = lo;
        d.upper[last] = hi;
        d.periodic[last] = false;
        d
    }

    /// `count` nodes along coordinate `i`: endpoints included for bounded
    /// coordinates, the wrap-around duplicate dropped for periodic ones, and
    /// the midpoint when `count == 1`.
    pub fn axis_nodes(&self, i: usize, count: usize) -> Vec<f64> {
        let (lo, hi) = (self.lower[i], self.upper[i]);
        match count {
            0 => vec![],
            1 => vec![0.5 * (lo + hi)],
            _ if self.periodic[i] => (0..count)
                .map(|j| lo + (hi - lo) * j as f64 / count as f64)
                .collect(),
            _ => (0..count)
                .map(|j| lo + (hi - lo) * j as f64 / (count - 1) as f64)
                .collect(),
        }
    }
}

/// Metric components together with their first and second coordinate
/// derivatives at one point. `dg[c]` is `d_c g`, `ddg[c][d]` is `d_c d_d g`.
#[derive(Debug, Clone)]
pub struct MetricJet {
    pub g: DMatrix<f64>,
    pub dg: Vec<DMatrix<f64>>,
    pub ddg: Vec<Vec<DMatrix<f64>>>,
}

impl MetricJet {
    pub fn dim(&self) -> usize {
        self.g.nrows()
    }
}

/// A Riemannian metric on a coordinate box.
pub trait Chart: Send + Sync {
    fn dim(&self) -> usize;

    fn domain(&self) -> &Domain;

    /// Metric matrix at raw coordinates. No domain or definiteness checks;
    /// finite-difference stencils may step slightly outside the box.
    fn metric_at(&self, coords: &[f64]) -> DMatrix<f64>;

    /// Metric jet at raw coordinates. Charts with closed-form derivatives
    /// override this; the default is the finite-difference fallback.
    fn jet_at(&self, coords: &[f64]) -> MetricJet {
        FiniteDifference::default().jet(self, coords)
    }
}

impl<C: Chart + ?Sized> Chart for &C {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn domain(&self) -> &Domain {
        (**self).domain()
    }
    fn metric_at(&self, coords: &[f64]) -> DMatrix<f64> {
        (**self).metric_at(coords)
    }
    fn jet_at(&self, coords: &[f64]) -> MetricJet {
        (**self).jet_at(coords)
    }
}

pub(crate) fn check_in_domain(ch: &(impl Chart + ?Sized), coords: &[f64]) -> Result<()> {
    if ch.domain().contains(coords) {
        Ok(())
    } else {
        Err(GlueError::OutOfDomain {
            coords: coords.to_vec(),
        })
    }
}

/// Full `n x n` metric at `p`, checked for domain membership, symmetry and
/// positive definiteness.
pub fn evaluate_metric(ch: &(impl Chart + ?Sized), p: &Point) -> Result<DMatrix<f64>> {
    let coords = p.coords();
    check_in_domain(ch, &coords)?;
    let g = ch.metric_at(&coords);
    if asymmetry(&g) > 1e-12 || g.clone().cholesky().is_none() {
        return Err(GlueError::NotPositiveDefinite { coords });
    }
    Ok(g)
}

/// Central-difference derivative rule with optional Richardson extrapolation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiniteDifference {
    pub step: f64,
    pub richardson: bool,
}

impl Default for FiniteDifference {
    fn default() -> Self {
        FiniteDifference {
            step: 1e-4,
            richardson: true,
        }
    }
}

impl FiniteDifference {
    pub fn plain(step: f64) -> Self {
        FiniteDifference {
            step,
            richardson: false,
        }
    }

    fn shifted(coords: &[f64], moves: &[(usize, f64)]) -> Vec<f64> {
        let mut c = coords.to_vec();
        for &(i, d) in moves {
            c[i] += d;
        }
        c
    }

    fn jet_with_step<C: Chart + ?Sized>(ch: &C, coords: &[f64], h: f64) -> MetricJet {
        let n = ch.dim();
        let g = ch.metric_at(coords);
        let at = |moves: &[(usize, f64)]| ch.metric_at(&Self::shifted(coords, moves));
        let mut dg = Vec::with_capacity(n);
        let mut plus = Vec::with_capacity(n);
        let mut minus = Vec::with_capacity(n);
        for c in 0..n {
            let p = at(&[(c, h)]);
            let m = at(&[(c, -h)]);
            dg.push((&p - &m) / (2.0 * h));
            plus.push(p);
            minus.push(m);
        }
        let mut ddg = vec![vec![DMatrix::zeros(n, n); n]; n];
        for c in 0..n {
            ddg[c][c] = (&plus[c] - &g * 2.0 + &minus[c]) / (h * h);
            for d in (c + 1)..n {
                let pp = at(&[(c, h), (d, h)]);
                let pm = at(&[(c, h), (d, -h)]);
                let mp = at(&[(c, -h), (d, h)]);
                let mm = at(&[(c, -h), (d, -h)]);
                let mixed = (pp - pm - mp + mm) / (4.0 * h * h);
                ddg[d][c] = mixed.clone();
                ddg[c][d] = mixed;
            }
        }
        MetricJet { g, dg, ddg }
    }

    pub fn jet<C: Chart + ?Sized>(&self, ch: &C, coords: &[f64]) -> MetricJet {
        let coarse = Self::jet_with_step(ch, coords, self.step);
        if !self.richardson {
            return coarse;
        }
        let fine = Self::jet_with_step(ch, coords, 0.5 * self.step);
        let extrapolate = |f: &DMatrix<f64>, c: &DMatrix<f64>| (f * 4.0 - c) / 3.0;
        MetricJet {
            g: fine.g.clone(),
            dg: fine
                .dg
                .iter()
                .zip(&coarse.dg)
                .map(|(f, c)| extrapolate(f, c))
                .collect(),
            ddg: fine
                .ddg
                .iter()
                .zip(&coarse.ddg)
                .map(|(fr, cr)| fr.iter().zip(cr).map(|(f, c)| extrapolate(f, c)).collect())
                .collect(),
        }
    }
}

/// Wraps a chart so that its jet is always taken by finite differences.
/// Used as the independent oracle for charts with closed-form jets.
pub struct FdChart<C> {
    pub inner: C,
    pub fd: FiniteDifference,
}

impl<C: Chart> FdChart<C> {
    pub fn new(inner: C, fd: FiniteDifference) -> Self {
        FdChart { inner, fd }
    }
}

impl<C: Chart> Chart for FdChart<C> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn domain(&self) -> &Domain {
        self.inner.domain()
    }
    fn metric_at(&self, coords: &[f64]) -> DMatrix<f64> {
        self.inner.metric_at(coords)
    }
    fn jet_at(&self, coords: &[f64]) -> MetricJet {
        self.fd.jet(&self.inner, coords)
    }
}
