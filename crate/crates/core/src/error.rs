use thiserror::Error;

/// Errors raised by the geometry, gluing and certification routines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum GlueError {
    #[error("point {coords:?} lies outside the chart domain")]
    OutOfDomain { coords: Vec<f64> },

    #[error("metric is not positive definite at {coords:?}")]
    NotPositiveDefinite { coords: Vec<f64> },

    #[error("plane is degenerate (|u^v|^2 = {area2:e})")]
    DegeneratePlane { area2: f64 },

    #[error("sampling plan produced no samples")]
    EmptySampling,

    #[error("operator is not symmetric (asymmetry {asymmetry:e})")]
    NonSymmetric { asymmetry: f64 },

    #[error("collar on [{lo}, {hi}] does not cover the required interval [{need_lo}, {need_hi}]")]
    CollarTooShallow {
        lo: f64,
        hi: f64,
        need_lo: f64,
        need_hi: f64,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("smoothing band half-width {nu} is too wide (limit {limit})")]
    BandTooWide { nu: f64, limit: f64 },

    #[error("no mollification radius down to {min_radius:e} meets the C1 budget {mu:e} (worst excess {excess:e})")]
    BudgetInfeasible {
        mu: f64,
        min_radius: f64,
        excess: f64,
    },

    #[error("graph on the sample nodes is disconnected")]
    DisconnectedGraph,

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, GlueError>;
