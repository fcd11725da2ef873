//! Chart metrics with a distinguished collar coordinate and the model collar
//! families (warped products over round spheres, diagonal torus collars).

mod chart;
mod collar;
mod section;
pub(crate) mod sym_form;

pub use chart::{evaluate_metric, Chart, Domain, FdChart, FiniteDifference, MetricJet, Point};
pub(crate) use chart::check_in_domain;
pub use collar::{CollarChart, CollarMetric, Side, SliceChart, SliceFamily};
pub use section::{CrossSection, SectionJet, POLE_MARGIN};
pub use sym_form::{SymForm, SYMMETRY_TOL};
