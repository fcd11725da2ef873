use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::curvature::operators::complement_basis;
use crate::metric::{CrossSection, Domain, Point};

const PRIMES: [u8; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Grid and direction sampling used by the curvature minimisers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplingPlan {
    /// Nodes per cross-section coordinate. Missing entries default to 3.
    pub x_counts: Vec<usize>,
    /// Nodes in the collar coordinate (per region when certifying glued metrics).
    pub t_count: usize,
    /// Unit directions per point for `Ric_k`.
    pub directions: usize,
    pub refine_rounds: usize,
    pub refine_directions: usize,
    /// Angular radius of the first refinement round; halves every round.
    pub refine_radius: f64,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        SamplingPlan {
            x_counts: vec![],
            t_count: 9,
            directions: 200,
            refine_rounds: 1,
            refine_directions: 50,
            refine_radius: 0.1,
        }
    }
}

impl SamplingPlan {
    pub fn x_count(&self, i: usize) -> usize {
        self.x_counts.get(i).copied().unwrap_or(3)
    }

    /// Every grid count and the direction budget doubled.
    pub fn doubled(&self, section_dim: usize) -> SamplingPlan {
        SamplingPlan {
            x_counts: (0..section_dim).map(|i| 2 * self.x_count(i)).collect(),
            t_count: 2 * self.t_count,
            directions: 2 * self.directions,
            refine_directions: 2 * self.refine_directions,
            ..self.clone()
        }
    }

    /// Cross-section nodes (all but the last coordinate of `domain`).
    pub fn x_nodes(&self, domain: &Domain) -> Vec<Vec<f64>> {
        let m = domain.dim() - 1;
        let axes: Vec<Vec<f64>> = (0..m).map(|i| domain.axis_nodes(i, self.x_count(i))).collect();
        cartesian(&axes)
    }

    /// Nodes on every coordinate of a cross-section.
    pub fn section_nodes(&self, section: &CrossSection) -> Vec<Vec<f64>> {
        let d = section.domain();
        let axes: Vec<Vec<f64>> = (0..d.dim()).map(|i| d.axis_nodes(i, self.x_count(i))).collect();
        cartesian(&axes)
    }

    /// Points of the full grid, t varying fastest.
    pub fn grid(&self, domain: &Domain) -> Vec<Point> {
        let last = domain.dim() - 1;
        let ts = domain.axis_nodes(last, self.t_count);
        points_on(&self.x_nodes(domain), &ts)
    }
}

pub(crate) fn points_on(xs: &[Vec<f64>], ts: &[f64]) -> Vec<Point> {
    xs.iter()
        .flat_map(|x| ts.iter().map(move |&t| Point::new(x.clone(), t)))
        .collect()
}

pub(crate) fn cartesian(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = vec![vec![]];
    for axis in axes {
        let mut next = Vec::with_capacity(out.len() * axis.len());
        for prefix in &out {
            for &v in axis {
                let mut p = prefix.clone();
                p.push(v);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// `count` deterministic unit vectors of `R^dim` from a Halton sequence
/// pushed through the Gaussian quantile and normalised.
pub fn halton_sphere(dim: usize, count: usize) -> Vec<DVector<f64>> {
    assert!(dim >= 1 && dim <= PRIMES.len(), "unsupported dimension {dim}");
    let normal = Normal::standard();
    let mut out = Vec::with_capacity(count);
    let mut index = 1usize;
    while out.len() < count {
        let v = DVector::from_fn(dim, |i, _| normal.inverse_cdf(halton::number(PRIMES[i], index)));
        index += 1;
        let norm = v.norm();
        if norm > 1e-12 {
            out.push(v / norm);
        }
    }
    out
}

/// Direction set for unit-sphere sweeps: the axes, the diagonals
/// `(e_i +- e_j)/sqrt 2`, then Halton directions, truncated to `count`
/// (never fewer than the axes).
pub fn direction_set(dim: usize, count: usize) -> Vec<DVector<f64>> {
    let axis = |i: usize| DVector::from_fn(dim, |j, _| if i == j { 1.0 } else { 0.0 });
    let mut dirs: Vec<DVector<f64>> = (0..dim).map(axis).collect();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..dim {
        for j in (i + 1)..dim {
            dirs.push((axis(i) + axis(j)) * s);
            dirs.push((axis(i) - axis(j)) * s);
        }
    }
    let target = count.max(dim);
    if dirs.len() < target {
        dirs.extend(halton_sphere(dim, target - dirs.len()));
    }
    dirs.truncate(target);
    dirs
}

/// `count` unit vectors at angle `radius` from the unit vector `center`.
pub fn perturbations(center: &DVector<f64>, radius: f64, count: usize) -> Vec<DVector<f64>> {
    let n = center.len();
    if n < 2 {
        return vec![];
    }
    let basis = complement_basis(center);
    let offsets: Vec<DVector<f64>> = if n == 2 {
        (0..count).map(|i| DVector::from_element(1, if i % 2 == 0 { 1.0 } else { -1.0 })).collect()
    } else {
        halton_sphere(n - 1, count)
    };
    let (c, s) = (radius.cos(), radius.sin());
    offsets
        .into_iter()
        .map(|z| (center * c + &basis * z * s).normalize())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directions_are_unit_and_deterministic() {
        let a = direction_set(4, 200);
        let b = direction_set(4, 200);
        assert_eq!(a.len(), 200);
        assert_eq!(a, b);
        assert!(a.iter().all(|d| (d.norm() - 1.0).abs() < 1e-14));
    }

    #[test]
    fn perturbations_keep_their_angle() {
        let c = DVector::from_vec(vec![0.2, 0.5, -0.3, 0.4]).normalize();
        for p in perturbations(&c, 0.1, 20) {
            assert!((p.dot(&c).acos() - 0.1).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_respects_counts_and_periodicity() {
        let d = Domain {
            lower: vec![0.0, 0.0, -1.0],
            upper: vec![1.0, 2.0, 1.0],
            periodic: vec![false, true, false],
        };
        let plan = SamplingPlan {
            x_counts: vec![2, 4],
            t_count: 3,
            ..Default::default()
        };
        let g = plan.grid(&d);
        assert_eq!(g.len(), 2 * 4 * 3);
        assert!(g.iter().all(|p| p.x[1] < 2.0));
    }
}
