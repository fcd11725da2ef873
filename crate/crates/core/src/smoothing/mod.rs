//! Mollification of C1 junctions: each metric coefficient is replaced near
//! the junction by a blend of its convolution with an even bump kernel and
//! itself, giving a smooth function C1-close to the original whose second
//! derivative stays between the one-sided values at the band edges.

mod band;
mod glued;
mod scalar;

pub use band::{Band, BandContract, QUADRATURE_POINTS};
pub use glued::{smooth_glued, SmoothedGlued, SmoothingReport};
pub use scalar::{mollify_c1, MollifiedScalar, MollifyReport, PiecewiseC1Scalar};
