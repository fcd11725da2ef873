use std::sync::OnceLock;

use gauss_quad::GaussLegendre;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{GlueError, Result};

/// Gauss-Legendre points per kernel sub-window.
pub const QUADRATURE_POINTS: usize = 64;

/// Points of the grid on which the smoothing contract is verified.
const CONTRACT_SAMPLES: usize = 201;

/// Number of radius halvings tried before giving up.
const MAX_HALVINGS: usize = 30;

/// Value, first and second derivative of a (matrix-valued) function of t.
pub type Jet = [DMatrix<f64>; 3];

fn symmetric_rule(points: usize) -> Vec<(f64, f64)> {
    let mut pairs = GaussLegendre::new(points)
        .expect("Gauss-Legendre rule")
        .into_node_weight_pairs();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Enforce exact symmetry so that even kernels stay even after quadrature.
    let n = pairs.len();
    for i in 0..n / 2 {
        let x = 0.5 * (pairs[n - 1 - i].0 - pairs[i].0);
        let w = 0.5 * (pairs[n - 1 - i].1 + pairs[i].1);
        pairs[i] = (-x, w);
        pairs[n - 1 - i] = (x, w);
    }
    if n % 2 == 1 {
        pairs[n / 2].0 = 0.0;
    }
    pairs
}

fn rule(points: usize) -> &'static [(f64, f64)] {
    static R64: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    static R128: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    match points {
        64 => R64.get_or_init(|| symmetric_rule(64)),
        128 => R128.get_or_init(|| symmetric_rule(128)),
        _ => panic!("unsupported quadrature size {points}"),
    }
}

/// Unnormalised even bump `exp(-1/(1-s^2))` on `(-1, 1)`.
fn bump(s: f64) -> f64 {
    let q = 1.0 - s * s;
    if q <= 0.0 {
        0.0
    } else {
        (-1.0 / q).exp()
    }
}

/// `psi(x) = exp(-1/x)` for `x > 0` with its first two derivatives.
fn psi(x: f64) -> [f64; 3] {
    if x <= 0.0 {
        return [0.0; 3];
    }
    let p = (-1.0 / x).exp();
    let x2 = x * x;
    [p, p / x2, p * (1.0 / (x2 * x2) - 2.0 / (x2 * x))]
}

/// Smooth step `S(x) = psi(x) / (psi(x) + psi(1-x))`, 0 for `x <= 0` and 1
/// for `x >= 1`, with `S'` and `S''`.
fn step(x: f64) -> [f64; 3] {
    if x <= 0.0 {
        return [0.0; 3];
    }
    if x >= 1.0 {
        return [1.0, 0.0, 0.0];
    }
    let [a, da, dda] = psi(x);
    let [b, db, ddb] = psi(1.0 - x);
    let (db, ddb) = (-db, ddb);
    let d = a + b;
    let dd = da + db;
    let num = da * b - a * db;
    let dnum = dda * b - a * ddb;
    [a / d, num / (d * d), dnum / (d * d) - 2.0 * num * dd / (d * d * d)]
}

/// A smoothing band `[t0 - nu, t0 + nu]` with kernel radius `delta`.
///
/// Inside the band the function `h` is replaced by
/// `H = chi (h * rho_delta) + (1 - chi) h`, where `chi` is a smooth cutoff
/// equal to 1 on `|t - t0| <= nu/2` and 0 for `|t - t0| >= nu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub t0: f64,
    pub nu: f64,
    pub delta: f64,
    #[serde(skip, default = "default_points")]
    points: usize,
}

fn default_points() -> usize {
    QUADRATURE_POINTS
}

/// Worst-case deviations of a smoothed band from the original function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandContract {
    /// Max over the band and all entries of `|H - h|` and `|H' - h'|`.
    pub c1_distance: f64,
    /// Largest distance of `H''` outside the interval spanned by
    /// `h''(t0 - nu)` and `h''(t0 + nu)` (0 when inside).
    pub second_excess: f64,
    /// Range of `H''` over the band and all entries.
    pub second_range: (f64, f64),
    /// Range spanned by the one-sided endpoint values `h''(t0 -+ nu)`.
    pub second_bounds: (f64, f64),
}

impl BandContract {
    pub fn satisfied(&self, mu: f64) -> bool {
        self.c1_distance <= mu && self.second_excess <= mu
    }

    fn excess(&self, mu: f64) -> f64 {
        (self.c1_distance - mu).max(self.second_excess - mu)
    }
}

impl Band {
    pub fn new(t0: f64, nu: f64, delta: f64) -> Self {
        Band {
            t0,
            nu,
            delta,
            points: QUADRATURE_POINTS,
        }
    }

    /// Same band with the doubled quadrature rule.
    pub fn refined(&self) -> Self {
        Band {
            points: 2 * QUADRATURE_POINTS,
            ..*self
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        (t - self.t0).abs() < self.nu
    }

    /// `chi`, `chi'`, `chi''` at `t`.
    pub fn cutoff(&self, t: f64) -> [f64; 3] {
        let half = 0.5 * self.nu;
        let r = t - self.t0;
        let u = (r.abs() - half) / half;
        let [s, ds, dds] = step(u);
        let sign = if r >= 0.0 { 1.0 } else { -1.0 };
        [1.0 - s, -ds * sign / half, -dds / (half * half)]
    }

    /// `(h^{(k)} * rho_delta)(t)` for `k = 0, 1, 2`. The kernel window is
    /// split at the junction so that each sub-rule sees a smooth integrand,
    /// and the kernel is normalised by the same quadrature.
    pub fn convolve(&self, h: &dyn Fn(f64) -> Jet, t: f64) -> Jet {
        let s_star = (t - self.t0) / self.delta;
        let segments: &[(f64, f64)] = if s_star.abs() < 1.0 {
            &[(-1.0, s_star), (s_star, 1.0)]
        } else {
            &[(-1.0, 1.0)]
        };
        let mut acc: Option<Jet> = None;
        let mut mass = 0.0;
        for &(a, b) in segments {
            let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
            if half <= 0.0 {
                continue;
            }
            for &(xi, w) in rule(self.points) {
                let s = mid + half * xi;
                let weight = w * half * bump(s);
                if weight == 0.0 {
                    continue;
                }
                mass += weight;
                let [v0, v1, v2] = h(t - s * self.delta);
                match acc.as_mut() {
                    None => acc = Some([v0 * weight, v1 * weight, v2 * weight]),
                    Some(j) => {
                        j[0] += v0 * weight;
                        j[1] += v1 * weight;
                        j[2] += v2 * weight;
                    }
                }
            }
        }
        let [a0, a1, a2] = acc.expect("kernel has positive mass");
        [a0 / mass, a1 / mass, a2 / mass]
    }

    /// Value and first two derivatives of the smoothed function.
    pub fn jet(&self, h: &dyn Fn(f64) -> Jet, t: f64) -> Jet {
        let [h0, h1, h2] = h(t);
        if !self.contains(t) {
            return [h0, h1, h2];
        }
        let [chi, dchi, ddchi] = self.cutoff(t);
        let [c0, c1, c2] = self.convolve(h, t);
        let d0 = &c0 - &h0;
        let d1 = &c1 - &h1;
        [
            &h0 + &d0 * chi,
            &h1 + &d1 * chi + &d0 * dchi,
            &c2 * chi + &h2 * (1.0 - chi) + &d1 * (2.0 * dchi) + &d0 * ddchi,
        ]
    }

    /// Sample points of the contract grid, endpoints included.
    pub fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        (0..CONTRACT_SAMPLES)
            .map(move |i| self.t0 + self.nu * (2.0 * i as f64 / (CONTRACT_SAMPLES - 1) as f64 - 1.0))
    }

    /// Measures the C1 distance and second-derivative interval of the
    /// smoothed function against `h` on the band.
    pub fn contract(&self, h: &dyn Fn(f64) -> Jet) -> BandContract {
        let left = h(self.t0 - self.nu)[2].clone();
        let right = h(self.t0 + self.nu)[2].clone();
        let lo = left.zip_map(&right, f64::min);
        let hi = left.zip_map(&right, f64::max);
        let mut c = BandContract {
            c1_distance: 0.0,
            second_excess: 0.0,
            second_range: (f64::INFINITY, f64::NEG_INFINITY),
            second_bounds: (lo.min(), hi.max()),
        };
        for t in self.grid() {
            let orig = h(t);
            let sm = self.jet(h, t);
            c.c1_distance = c
                .c1_distance
                .max((&sm[0] - &orig[0]).amax())
                .max((&sm[1] - &orig[1]).amax());
            for ((v, l), u) in sm[2].iter().zip(lo.iter()).zip(hi.iter()) {
                c.second_excess = c.second_excess.max(l - v).max(v - u);
                c.second_range = (c.second_range.0.min(*v), c.second_range.1.max(*v));
            }
        }
        c
    }

    /// Largest change of the kernel convolutions `h^{(k)} * rho` (k = 0..2)
    /// on the contract grid when the quadrature rule is doubled.
    pub fn quadrature_change(&self, h: &dyn Fn(f64) -> Jet) -> f64 {
        self.refinement_change(|b, t| b.convolve(h, t))
    }

    /// Largest change of the smoothed `H, H', H''` under the doubled rule.
    /// This includes rounding amplified by the cutoff derivatives.
    pub fn smoothed_change(&self, h: &dyn Fn(f64) -> Jet) -> f64 {
        self.refinement_change(|b, t| b.jet(h, t))
    }

    fn refinement_change(&self, eval: impl Fn(&Band, f64) -> Jet) -> f64 {
        let fine = self.refined();
        self.grid()
            .filter(|&t| self.contains(t))
            .map(|t| {
                let a = eval(self, t);
                let b = eval(&fine, t);
                (0..3).map(|k| (&a[k] - &b[k]).amax()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

/// Halves the kernel radius from `nu / 4` until every band meets the
/// contract for budget `mu`.
pub(crate) fn search_radius(t0s: &[f64], nu: f64, mu: f64, h: &dyn Fn(f64) -> Jet) -> Result<(f64, Vec<BandContract>)> {
    let mut delta = 0.25 * nu;
    let mut worst_excess = f64::INFINITY;
    for _ in 0..=MAX_HALVINGS {
        let contracts: Vec<BandContract> = t0s.iter().map(|&t0| Band::new(t0, nu, delta).contract(h)).collect();
        if contracts.iter().all(|c| c.satisfied(mu)) {
            return Ok((delta, contracts));
        }
        worst_excess = contracts.iter().map(|c| c.excess(mu)).fold(f64::NEG_INFINITY, f64::max);
        delta *= 0.5;
    }
    Err(GlueError::BudgetInfeasible {
        mu,
        min_radius: 2.0 * delta,
        excess: worst_excess,
    })
}
