//! Cubic-spline gluing of Riemannian collar metrics, mollification to a
//! smooth metric, and grid certification of intermediate curvature bounds.

pub mod curvature;
pub mod error;
pub mod fit;
pub mod gluing;
pub mod metric;
pub mod scalar;
pub mod smoothing;
pub mod verifier;

pub use error::{GlueError, Result};
