use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{GlueError, Result};
use crate::scalar::SmoothFn;
use crate::smoothing::band::{search_radius, Band, Jet};

/// Relative tolerance for value and slope agreement at a C1 junction.
const JUNCTION_TOL: f64 = 1e-10;

/// Relative tolerance under which two pieces count as the same smooth
/// function (derivatives up to order 4 agree) and no smoothing is done.
const IDENTITY_TOL: f64 = 1e-12;

/// `f` on `t <= t0` and `g` on `t > t0`, C1 at `t0`.
#[derive(Clone)]
pub struct PiecewiseC1Scalar {
    left: Arc<dyn SmoothFn>,
    right: Arc<dyn SmoothFn>,
    t0: f64,
    /// Interval on which the pieces may be evaluated.
    domain: (f64, f64),
}

impl std::fmt::Debug for PiecewiseC1Scalar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PiecewiseC1Scalar")
            .field("t0", &self.t0)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

impl PiecewiseC1Scalar {
    pub fn new(left: impl SmoothFn + 'static, right: impl SmoothFn + 'static, t0: f64) -> Result<Self> {
        let (left, right): (Arc<dyn SmoothFn>, Arc<dyn SmoothFn>) = (Arc::new(left), Arc::new(right));
        for order in 0..2 {
            let (a, b) = (left.deriv(t0, order), right.deriv(t0, order));
            if !close(a, b, JUNCTION_TOL) {
                return Err(GlueError::InvalidInput(format!(
                    "pieces are not C1 at t0 = {t0}: derivative {order} is {a} vs {b}"
                )));
            }
        }
        Ok(PiecewiseC1Scalar {
            left,
            right,
            t0,
            domain: (f64::NEG_INFINITY, f64::INFINITY),
        })
    }

    /// Restricts where the pieces may be evaluated.
    pub fn with_domain(mut self, lo: f64, hi: f64) -> Self {
        self.domain = (lo, hi);
        self
    }

    pub fn junction(&self) -> f64 {
        self.t0
    }

    fn piece(&self, t: f64) -> &dyn SmoothFn {
        if t <= self.t0 {
            &*self.left
        } else {
            &*self.right
        }
    }

    pub fn deriv(&self, t: f64, order: usize) -> f64 {
        self.piece(t).deriv(t, order)
    }

    fn jet(&self, t: f64) -> Jet {
        let p = self.piece(t);
        [0, 1, 2].map(|k| DMatrix::from_element(1, 1, p.deriv(t, k)))
    }

    fn pieces_agree(&self) -> bool {
        (0..=4).all(|k| close(self.left.deriv(self.t0, k), self.right.deriv(self.t0, k), IDENTITY_TOL))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MollifyReport {
    pub nu: f64,
    pub mu: f64,
    /// Kernel radius found by the search (0 when no smoothing was needed).
    pub delta: f64,
    pub c1_distance: f64,
    /// Range of the smoothed second derivative over the band.
    pub second_range: (f64, f64),
    /// `[min, max]` of `f''(t0 - nu)` and `g''(t0 + nu)`.
    pub second_bounds: (f64, f64),
    /// Change of the kernel convolutions under the doubled quadrature rule.
    pub quadrature_change: f64,
    /// Change of `H, H', H''` under the doubled rule.
    pub smoothed_change: f64,
    /// The pieces already agreed to order 4 and were returned unchanged.
    pub identity: bool,
}

/// The smoothed function: original outside the band, mollified inside.
#[derive(Debug, Clone)]
pub struct MollifiedScalar {
    h: PiecewiseC1Scalar,
    band: Option<Band>,
    report: MollifyReport,
}

impl MollifiedScalar {
    pub fn report(&self) -> &MollifyReport {
        &self.report
    }

    pub fn band(&self) -> Option<&Band> {
        self.band.as_ref()
    }

    /// `H, H', H''` at `t`.
    pub fn jet(&self, t: f64) -> [f64; 3] {
        let jet = match &self.band {
            Some(b) => b.jet(&|s| self.h.jet(s), t),
            None => self.h.jet(t),
        };
        jet.map(|m| m[(0, 0)])
    }
}

impl SmoothFn for MollifiedScalar {
    /// Orders above 2 inside the band are central differences of the
    /// next-lower order.
    fn deriv(&self, t: f64, order: usize) -> f64 {
        match (&self.band, order) {
            (Some(b), k) if k > 2 && b.contains(t) => {
                let s = 1e-3 * b.delta;
                (self.deriv(t + s, k - 1) - self.deriv(t - s, k - 1)) / (2.0 * s)
            }
            (Some(_), k) if k <= 2 => self.jet(t)[k],
            _ => self.h.deriv(t, order),
        }
    }
}

/// Mollifies `h` on `[t0 - nu, t0 + nu]` so that the result is smooth,
/// within `mu` of `h` in C1, and has second derivative within `mu` of the
/// interval spanned by `f''(t0 - nu)` and `g''(t0 + nu)`.
pub fn mollify_c1(h: PiecewiseC1Scalar, nu: f64, mu: f64) -> Result<MollifiedScalar> {
    if !(nu > 0.0 && mu > 0.0) {
        return Err(GlueError::InvalidInput(format!("nu and mu must be positive (nu = {nu}, mu = {mu})")));
    }
    // The kernel window reaches nu + delta <= 1.25 nu from the junction.
    let room = (h.t0 - h.domain.0).min(h.domain.1 - h.t0);
    if 1.25 * nu > room {
        return Err(GlueError::BandTooWide { nu, limit: room / 1.25 });
    }
    if h.pieces_agree() {
        let f2 = h.deriv(h.t0 - nu, 2);
        let g2 = h.deriv(h.t0 + nu, 2);
        let range = Band::new(h.t0, nu, 0.25 * nu)
            .grid()
            .map(|t| h.deriv(t, 2))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        let report = MollifyReport {
            nu,
            mu,
            delta: 0.0,
            c1_distance: 0.0,
            second_range: range,
            second_bounds: (f2.min(g2), f2.max(g2)),
            quadrature_change: 0.0,
            smoothed_change: 0.0,
            identity: true,
        };
        return Ok(MollifiedScalar { h, band: None, report });
    }
    let jet = |s: f64| h.jet(s);
    let (delta, contracts) = search_radius(&[h.t0], nu, mu, &jet)?;
    let band = Band::new(h.t0, nu, delta);
    let c = contracts[0];
    let report = MollifyReport {
        nu,
        mu,
        delta,
        c1_distance: c.c1_distance,
        second_range: c.second_range,
        second_bounds: c.second_bounds,
        quadrature_change: band.quadrature_change(&jet),
        smoothed_change: band.smoothed_change(&jet),
        identity: false,
    };
    Ok(MollifiedScalar {
        h,
        band: Some(band),
        report,
    })
}
