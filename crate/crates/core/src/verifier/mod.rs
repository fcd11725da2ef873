//! Certification of glued metrics and numerical checks of the quantitative
//! statements behind the gluing: convergence rates of the spline metric,
//! the Gauss equation on slices, the interpolation bound for sectional
//! curvature sums, nearly orthonormal frames, doubles with totally geodesic
//! middle slice, and almost non-negative curvature after gluing.

mod certify;
mod diameter;
mod lemmas;
mod nonneg;
mod rates;
mod search;

pub use certify::{
    certify, CurvatureCertificate, RegionMinimum, RegionPiece, Regioned, SamplingMetadata, WITNESS_TOL,
};
pub use diameter::{diameter_estimate, DiameterEstimate};
pub use lemmas::{
    eta_frame_report, eta_of, gauss_check, gauss_order, interpolation_bound_check, totally_geodesic_check, EtaReport,
    GaussOrderReport, GaussReport, InterpolationReport, TotallyGeodesicReport, INTERPOLATION_FLOOR, MIRROR_SYMMETRY_TOL, TOTALLY_GEODESIC_NU_MIN, TOTALLY_GEODESIC_TOL,
};
pub use nonneg::{almost_nonneg_check, AlmostNonnegReport};
pub use rates::{
    rate_suite, ricci_limit, RateClaim, RateGrid, RateReport, RicciLimitReport, BOUNDED_SLOPE, LINEAR_WINDOW,
    ZERO_DEVIATION,
};
pub use search::{epsilon_nu_search, rebuild, SearchAttempt, SearchOutcome, SearchReport, SearchSchedule, Stage};
