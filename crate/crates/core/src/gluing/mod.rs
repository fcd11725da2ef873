//! The C1 cubic-spline interpolation between two collar metrics, the glued
//! chart built from it, and the checks on the boundary data that make the
//! gluing curvature-preserving.

mod checks;
mod glued;
mod params;
mod spline;

pub use checks::{
    boundary_condition_check, boundary_difference, convexity_kernel_check, second_fundamental_form, spline_d1_check,
    spline_d1_order, BoundaryReport, ConvexityReport, D1Report,
};
pub use glued::{assemble_glued, GluedMetric, Region};
pub use params::GluingParams;
pub use spline::{spline_family, SplineFamily};
