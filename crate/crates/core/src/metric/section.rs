use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::metric::chart::Domain;

/// Polar angles are kept this far away from the coordinate poles.
pub const POLE_MARGIN: f64 = 0.1;

/// The boundary cross-section `X` with its reference metric `sigma(x)`.
///
/// Collar metrics are entrywise products `P(t) * sigma(x)` of a t-profile
/// with this reference form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CrossSection {
    /// Unit round sphere `S^dim` in hyperspherical coordinates
    /// `(theta_1, ..., theta_{dim-1}, phi)`.
    RoundSphere { dim: usize },
    /// Flat torus with the given periods.
    FlatTorus { periods: Vec<f64> },
}

/// Reference form and its coordinate derivatives at a point of `X`.
pub struct SectionJet {
    pub sigma: DMatrix<f64>,
    pub d: Vec<DMatrix<f64>>,
    pub dd: Vec<Vec<DMatrix<f64>>>,
}

impl CrossSection {
    pub fn round_sphere(dim: usize) -> Self {
        CrossSection::RoundSphere { dim }
    }

    pub fn unit_torus(dim: usize) -> Self {
        CrossSection::FlatTorus {
            periods: vec![1.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            CrossSection::RoundSphere { dim } => *dim,
            CrossSection::FlatTorus { periods } => periods.len(),
        }
    }

    pub fn domain(&self) -> Domain {
        match self {
            CrossSection::RoundSphere { dim } => {
                let m = *dim;
                let mut lower = vec![POLE_MARGIN; m];
                let mut upper = vec![std::f64::consts::PI - POLE_MARGIN; m];
                let mut periodic = vec![false; m];
                lower[m - 1] = 0.0;
                upper[m - 1] = 2.0 * std::f64::consts::PI;
                periodic[m - 1] = true;
                Domain {
                    lower,
                    upper,
                    periodic,
                }
            }
            CrossSection::FlatTorus { periods } => Domain {
                lower: vec![0.0; periods.len()],
                upper: periods.clone(),
                periodic: vec![true; periods.len()],
            },
        }
    }

    /// Upper bound of `|sigma_ij|` over the domain.
    pub fn coefficient_bound(&self) -> f64 {
        1.0
    }

    pub fn sigma(&self, x: &[f64]) -> DMatrix<f64> {
        let m = self.dim();
        match self {
            CrossSection::RoundSphere { .. } => {
                let mut s = DMatrix::zeros(m, m);
                let mut acc = 1.0;
                for k in 0..m {
                    s[(k, k)] = acc;
                    if k + 1 < m {
                        acc *= x[k].sin().powi(2);
                    }
                }
                s
            }
            CrossSection::FlatTorus { .. } => DMatrix::identity(m, m),
        }
    }

    pub fn jet(&self, x: &[f64]) -> SectionJet {
        let m = self.dim();
        let sigma = self.sigma(x);
        let mut d = vec![DMatrix::zeros(m, m); m];
        let mut dd = vec![vec![DMatrix::zeros(m, m); m]; m];
        if let CrossSection::RoundSphere { .. } = self {
            // sigma_kk = prod_{j<k} q(theta_j) with q = sin^2.
            let q: Vec<f64> = x.iter().map(|a| a.sin().powi(2)).collect();
            let dq: Vec<f64> = x.iter().map(|a| (2.0 * a).sin()).collect();
            let ddq: Vec<f64> = x.iter().map(|a| 2.0 * (2.0 * a).cos()).collect();
            for k in 0..m {
                let prod_except = |skip: &[usize]| -> f64 {
                    (0..k).filter(|j| !skip.contains(j)).map(|j| q[j]).product()
                };
                for a in 0..k {
                    d[a][(k, k)] = dq[a] * prod_except(&[a]);
                    dd[a][a][(k, k)] = ddq[a] * prod_except(&[a]);
                    for b in (a + 1)..k {
                        let v = dq[a] * dq[b] * prod_except(&[a, b]);
                        dd[a][b][(k, k)] = v;
                        dd[b][a][(k, k)] = v;
                    }
                }
            }
        }
        SectionJet { sigma, d, dd }
    }
}
