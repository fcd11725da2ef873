//! Names and descriptions of the checks a scenario can declare.

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    BoundaryCondition,
    C1Interface,
    ConvexityKernel,
    Certify,
    EpsilonNuSearch,
    Stability,
    RateSuite,
    RicciLimit,
    GaussCheck,
    InterpolationBound,
    EtaFrames,
    TotallyGeodesic,
    AlmostNonneg,
}

pub struct CheckInfo {
    pub name: CheckName,
    /// The statement the check exercises.
    pub anchor: &'static str,
    pub summary: &'static str,
    pub passes_when: &'static str,
}

pub const CATALOGUE: &[CheckInfo] = &[
    CheckInfo {
        name: CheckName::BoundaryCondition,
        anchor: "Theorem A hypothesis: h_1'(0) - h_2'(0) positive definite (Ric_k) or k-positive (Sc_k)",
        summary: "Evaluates h_1'(0) - h_2'(0) at the cross-section nodes. For Ric_k the smallest eigenvalue must be \
                  positive; for Sc_k the sum of the k smallest eigenvalues relative to h(0) must be positive. Also \
                  confirms that the two collars induce the same boundary metric.",
        passes_when: "the smallest margin over the nodes is strictly positive",
    },
    CheckInfo {
        name: CheckName::C1Interface,
        anchor: "Lemma on g_t: the spline matches values and first derivatives at t = -eps and t = eps",
        summary: "Compares the slice profile and its first t-derivative from both sides of each interface of the \
                  C1 glued metric at the scenario's eps.",
        passes_when: "both jumps are at most 1e-12",
    },
    CheckInfo {
        name: CheckName::ConvexityKernel,
        anchor: "Proposition on the curvature lower bound: convexity of the 2x2 determinant of the interpolated \
                 derivative",
        summary: "Draws random planes and checks that the determinant of the linear interpolation of h_1'(0) and \
                  h_2'(0) restricted to each plane is convex in t, via second differences.",
        passes_when: "every second difference is at least -1e-12",
    },
    CheckInfo {
        name: CheckName::Certify,
        anchor: "Theorem A / Corollary B: the glued metric has Ric_k > kappa (or Sc_k > kappa)",
        summary: "Grid-certifies the C1 glued metric at the scenario's eps, region by region (h1, spline, h2), and \
                  records the minimum, its witness and the per-region minima.",
        passes_when: "the sampled minimum exceeds kappa",
    },
    CheckInfo {
        name: CheckName::EpsilonNuSearch,
        anchor: "Propositions certifying Ric_k and Sc_k: 'for all eps sufficiently small'",
        summary: "Halves eps until the C1 metric certifies, then halves the smoothing band nu until the mollified \
                  metric certifies. Running out of widths is inconclusive, not a refutation.",
        passes_when: "a smooth metric is certified; otherwise the result is inconclusive",
    },
    CheckInfo {
        name: CheckName::Stability,
        anchor: "Grid certification stability: the certified margin under a doubled sampling grid",
        summary: "Re-certifies the metric found by the search with every grid count and direction budget doubled.",
        passes_when: "it still passes and the margin changes by less than the stability tolerance (20%)",
    },
    CheckInfo {
        name: CheckName::RateSuite,
        anchor: "Lemma on g_t (i)-(iii), Lemma K(ii) and Lemma on Ricci estimates",
        summary: "Fits log-log slopes over an eps ladder for |g_t - h_i(0)|, the deviation of g_t' from linear \
                  interpolation, g_t'' - (h_2'(0) - h_1'(0))/2eps, K(u,dt) - D(u,u)/4eps and Ric - L/2eps, where \
                  D = h_1'(0) - h_2'(0).",
        passes_when: "O(eps) quantities fit slopes in [0.8, 1.2] and O(1) quantities |slope| <= 0.2",
    },
    CheckInfo {
        name: CheckName::RicciLimit,
        anchor: "Proposition on Sc_k: the eigenvalues of 2 eps Ric converge",
        summary: "Compares the eigenvalues of 2 eps Ric on the middle slice with half the eigenvalues of D \
                  relative to h(0) and half their sum.",
        passes_when: "the largest relative deviation is within the tolerance (10% at eps = 1e-3)",
    },
    CheckInfo {
        name: CheckName::GaussCheck,
        anchor: "Lemma K(i): the Gauss formula K(u_t, v_t) = K_t(u, v) - phi_t / psi_t",
        summary: "On random tangential planes, compares ambient sectional curvature (finite differences of the full \
                  metric) with the intrinsic slice curvature corrected by phi_t / psi_t, and fits the residual's \
                  order in the finite-difference step.",
        passes_when: "the residual is at most 1e-6 at the default step and its order is at least 1.9",
    },
    CheckInfo {
        name: CheckName::InterpolationBound,
        anchor: "Corollary on Ric_k interpolation: sum K_g(v_t, e_t) >= convex combination of the collar sums + O(eps)",
        summary: "Samples h(0)-orthonormal frames and compares the frame curvature sums of the spline metric with the \
                  convex combination of the collars' sums at t = 0, over the eps ladder.",
        passes_when: "violations stay at rounding level or vanish at order >= 0.8",
    },
    CheckInfo {
        name: CheckName::EtaFrames,
        anchor: "Observation on nearly orthonormal frames: g_t-orthonormal frames are eta-nearly orthonormal for h_i(0)",
        summary: "Measures the largest Gram deviation from h(0)-orthonormality over sampled g_t-orthonormal frames.",
        passes_when: "eta vanishes or decays at order >= 0.8",
    },
    CheckInfo {
        name: CheckName::TotallyGeodesic,
        anchor: "Corollary D: the middle slice of a smoothed double is totally geodesic",
        summary: "For a double, smooths the glued metric and checks g(x, t) = g(x, -t) and that the second \
                  fundamental form of t = 0 vanishes.",
        passes_when: "symmetry defect <= 1e-10 and |II| <= 1e-8",
    },
    CheckInfo {
        name: CheckName::AlmostNonneg,
        anchor: "Corollary C: almost non-negative intermediate curvature, min curvature * diam^2 >= -delta",
        summary: "Runs the search with kappa = -delta / 2d^2, d the graph diameter of the C0 glued collar \
                  neighbourhood, and reports min curvature * diam^2 of the certified smooth metric.",
        passes_when: "the scaled minimum is at least -delta; inconclusive when the search runs out of widths",
    },
];

impl CheckName {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::BoundaryCondition => "boundary_condition",
            CheckName::C1Interface => "c1_interface",
            CheckName::ConvexityKernel => "convexity_kernel",
            CheckName::Certify => "certify",
            CheckName::EpsilonNuSearch => "epsilon_nu_search",
            CheckName::Stability => "stability",
            CheckName::RateSuite => "rate_suite",
            CheckName::RicciLimit => "ricci_limit",
            CheckName::GaussCheck => "gauss_check",
            CheckName::InterpolationBound => "interpolation_bound",
            CheckName::EtaFrames => "eta_frames",
            CheckName::TotallyGeodesic => "totally_geodesic",
            CheckName::AlmostNonneg => "almost_nonneg",
        }
    }

    pub fn info(self) -> &'static CheckInfo {
        CATALOGUE.iter().find(|c| c.name == self).expect("every check is catalogued")
    }

    pub fn parse(name: &str) -> CliResult<CheckName> {
        CATALOGUE
            .iter()
            .map(|c| c.name)
            .find(|c| c.as_str() == name)
            .ok_or_else(|| {
                let best = closest(name, CATALOGUE.iter().map(|c| c.name.as_str()));
                CliError::Input(format!(
                    "unknown check '{name}'{}",
                    best.map_or(String::new(), |b| format!("; did you mean '{b}'?"))
                ))
            })
    }
}

/// The candidate nearest to `name` in edit distance, if reasonably close.
pub fn closest<'a>(name: &str, candidates: impl Iterator<Item = &'a str>) -> Option<&'a str> {
    candidates
        .map(|c| (strsim::damerau_levenshtein(name, c), c))
        .filter(|(d, c)| *d <= c.len().max(name.len()) / 2 || c.contains(name) || name.contains(c))
        .min_by_key(|(d, _)| *d)
        .map(|(_, c)| c)
}

/// Text for `describe <check>`.
pub fn describe(name: &str) -> CliResult<String> {
    let info = CheckName::parse(name)?.info();
    Ok(format!(
        "{}\n  statement: {}\n  {}\n  passes when: {}\n",
        info.name.as_str(),
        info.anchor,
        info.summary,
        info.passes_when
    ))
}
