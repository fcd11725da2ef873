//! Christoffel symbols, the Riemann tensor and the curvature functionals
//! built on it: sectional curvature, Jacobi operators, `Ric_k` and `Sc_k`.

mod extremal;
mod operators;
mod sampling;
mod tensor;

pub use extremal::{ric_k_min, ric_k_min_over, ric_k_value, sc_k_min, sc_k_min_over, sc_k_value, CurvatureMin, CurvatureMode};
pub use operators::{
    ascending_eigenvalues, jacobi_from, jacobi_operator, k_positive_sum, orthonormal_frame, ricci_endomorphism,
    sectional, sectional_from, FrameCurvature, DEGENERATE_PLANE_TOL,
};
pub use sampling::{direction_set, halton_sphere, perturbations, SamplingPlan};
pub(crate) use sampling::points_on;
pub use tensor::{
    christoffel, christoffel_from_jet, curvature_at, curvature_at_coords, curvature_from_jet, riemann_from_jet,
    Christoffel, CurvatureAtPoint, Riemann,
};
