use serde::{Deserialize, Serialize};

use crate::error::{GlueError, Result};

/// Widths and budgets of one gluing run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GluingParams {
    /// Half-width of the spline region `[-eps, eps]`.
    pub eps: f64,
    /// Depth of the untouched collar kept beyond `+-eps`.
    pub iota: f64,
    /// Half-width of each smoothing band around `t = +-eps`.
    pub nu: f64,
    /// C1 distance budget for the smoothing.
    pub mu: f64,
    /// Curvature floor to certify against.
    pub kappa: f64,
    /// Budget for almost non-negative curvature.
    pub delta: f64,
}

impl Default for GluingParams {
    fn default() -> Self {
        GluingParams {
            eps: 0.05,
            iota: 0.1,
            nu: 0.005,
            mu: 1e-4,
            kappa: 0.0,
            delta: 0.1,
        }
    }
}

impl GluingParams {
    pub fn with_eps(eps: f64) -> Self {
        GluingParams {
            eps,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("eps", self.eps),
            ("iota", self.iota),
            ("nu", self.nu),
            ("mu", self.mu),
            ("delta", self.delta),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(GlueError::InvalidInput(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !self.kappa.is_finite() {
            return Err(GlueError::InvalidInput(format!("kappa must be finite, got {}", self.kappa)));
        }
        let limit = self.eps.min(self.iota);
        if self.nu >= limit {
            return Err(GlueError::BandTooWide { nu: self.nu, limit });
        }
        Ok(())
    }
}
