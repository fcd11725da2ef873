//! Scenario files: two collars, the curvature condition, gluing widths and
//! the list of checks to run, written as TOML.

use std::collections::BTreeMap;
use std::path::Path;

use collar_glue::curvature::{CurvatureMode, SamplingPlan};
use collar_glue::gluing::GluingParams;
use collar_glue::metric::CollarMetric;
use collar_glue::scalar::ScalarFn;
use collar_glue::verifier::SearchSchedule;
use serde::{Deserialize, Serialize};

use crate::catalogue::CheckName;
use crate::error::{CliError, CliResult};
use crate::shipped;

/// One collar in its inward normal coordinate `s >= 0`, on `[0, depth]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CollarSpec {
    /// Boundary collar of a geodesic ball of radius `radius` in the unit
    /// sphere: `ds^2 + sin^2(radius - s) g_{S^{n-1}}`.
    SphereCap { radius: f64, depth: f64 },
    /// `ds^2 + radius^2 g_{S^{n-1}}`.
    Cylinder { radius: f64, depth: f64 },
    /// `ds^2 + phi(s)^2 g_{S^{n-1}}`.
    Warped { phi: ScalarFn, depth: f64 },
    /// `ds^2 + sum_j a_j(s)^2 dx_j^2` over a unit flat torus of dimension `n - 1`.
    Torus { warps: Vec<ScalarFn>, depth: f64 },
}

impl CollarSpec {
    fn depth(&self) -> f64 {
        match self {
            CollarSpec::SphereCap { depth, .. }
            | CollarSpec::Cylinder { depth, .. }
            | CollarSpec::Warped { depth, .. }
            | CollarSpec::Torus { depth, .. } => *depth,
        }
    }

    fn is_torus(&self) -> bool {
        matches!(self, CollarSpec::Torus { .. })
    }

    /// The collar on `t in [0, depth]`, i.e. on the right of the gluing.
    pub fn build(&self, n: usize) -> CliResult<CollarMetric> {
        let depth = self.depth();
        if !(depth > 0.0 && depth.is_finite()) {
            return Err(CliError::Input(format!("collar depth must be positive, got {depth}")));
        }
        let interval = (0.0, depth);
        let collar = match self {
            CollarSpec::SphereCap { radius, .. } => {
                if !(*radius > depth && *radius < std::f64::consts::PI) {
                    return Err(CliError::Input(format!(
                        "sphere cap needs depth < radius < pi, got radius {radius}, depth {depth}"
                    )));
                }
                CollarMetric::warped_product(ScalarFn::sin(-1.0, *radius), n, interval)
            }
            CollarSpec::Cylinder { radius, .. } => {
                CollarMetric::warped_product(ScalarFn::constant(*radius), n, interval)
            }
            CollarSpec::Warped { phi, .. } => CollarMetric::warped_product(phi.clone(), n, interval),
            CollarSpec::Torus { warps, .. } => {
                if warps.len() + 1 != n {
                    return Err(CliError::Input(format!(
                        "torus collar has {} warps but dimension {n} needs {}",
                        warps.len(),
                        n - 1
                    )));
                }
                CollarMetric::diagonal_torus(warps.clone(), interval)
            }
        };
        Ok(collar?)
    }
}

/// `right` is glued on `t >= 0`; `left`, also written in its own inward
/// coordinate, is reflected onto `t <= 0`. Without `left` the scenario is
/// the double of `right`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollarPair {
    pub right: CollarSpec,
    #[serde(default)]
    pub left: Option<CollarSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

/// Tunables of the individual checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckSettings {
    /// Gluing widths for the rate suite and the frame and interpolation fits.
    pub rate_eps: Vec<f64>,
    pub rate_t_count: usize,
    pub rate_directions: usize,
    pub ricci_eps: f64,
    pub ricci_tolerance: f64,
    pub gauss_planes: usize,
    pub gauss_tolerance: f64,
    pub gauss_steps: Vec<f64>,
    pub gauss_min_order: f64,
    pub lemma_t_count: usize,
    pub frames: usize,
    pub convexity_pairs: usize,
    pub diameter_nodes: usize,
    /// Largest relative margin change under grid doubling.
    pub stability_tolerance: f64,
    /// t-samples per region in the curvature profile CSV.
    pub profile_t_count: usize,
    pub seed: u64,
}

impl Default for CheckSettings {
    fn default() -> Self {
        CheckSettings {
            rate_eps: vec![0.1, 0.05, 0.025, 0.0125],
            rate_t_count: 9,
            rate_directions: 40,
            ricci_eps: 1e-3,
            ricci_tolerance: 0.1,
            gauss_planes: 100,
            gauss_tolerance: 1e-6,
            gauss_steps: vec![1e-2, 5e-3, 2.5e-3],
            gauss_min_order: 1.9,
            lemma_t_count: 5,
            frames: 4,
            convexity_pairs: 1000,
            diameter_nodes: 6,
            stability_tolerance: 0.2,
            profile_t_count: 11,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    /// Total dimension `n` of the glued manifold.
    pub dimension: usize,
    pub mode: CurvatureMode,
    pub k: usize,
    pub collars: CollarPair,
    /// `eps`, `iota`, `nu`, `mu`, the floor `kappa` and the budget `delta`.
    #[serde(default)]
    pub gluing: GluingParams,
    #[serde(default)]
    pub schedule: SearchSchedule,
    #[serde(default)]
    pub sampling: SamplingPlan,
    pub checks: Vec<CheckName>,
    /// Declared outcome per check.
    #[serde(default)]
    pub expect: BTreeMap<CheckName, Outcome>,
    #[serde(default)]
    pub settings: CheckSettings,
}

/// The two collars of a validated scenario, `h1` on `t <= 0`.
pub struct Collars {
    pub h1: CollarMetric,
    pub h2: CollarMetric,
}

impl Scenario {
    pub fn from_toml(text: &str) -> CliResult<Scenario> {
        let sc: Scenario = toml::from_str(text).map_err(|e| CliError::Input(format!("scenario schema: {e}")))?;
        sc.validate()?;
        Ok(sc)
    }

    /// Reads a scenario file, or a shipped scenario when `source` names one
    /// and no such file exists.
    pub fn load(source: &str) -> CliResult<Scenario> {
        let path = Path::new(source);
        if path.exists() {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
            return Scenario::from_toml(&text);
        }
        match shipped::find(source) {
            Some(s) => Scenario::from_toml(s.text),
            None => Err(CliError::Input(format!(
                "no scenario file or shipped scenario named '{source}'{}",
                shipped::suggestion(source).map_or(String::new(), |s| format!(" (did you mean '{s}'?)"))
            ))),
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return Err(CliError::Input(format!(
                "name '{}' must be non-empty and use only letters, digits, '_' and '-'",
                self.name
            )));
        }
        if self.dimension < 3 {
            return Err(CliError::Input(format!("dimension must be at least 3, got {}", self.dimension)));
        }
        if let Some(left) = &self.collars.left {
            if left.is_torus() != self.collars.right.is_torus() {
                return Err(CliError::Input("both collars need the same cross-section type".into()));
            }
        }
        self.mode.check_k(self.k, self.dimension)?;
        self.gluing.validate()?;
        if self.checks.is_empty() {
            return Err(CliError::Input("no checks declared".into()));
        }
        if let Some(extra) = self.expect.keys().find(|c| !self.checks.contains(c)) {
            return Err(CliError::Input(format!("expectation for undeclared check '{}'", extra.as_str())));
        }
        let s = &self.settings;
        if s.rate_eps.len() < 2 || s.rate_eps.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            return Err(CliError::Input("settings.rate_eps needs at least two positive widths".into()));
        }
        if s.gauss_steps.len() < 2 || s.gauss_steps.iter().any(|&h| !(h > 0.0)) {
            return Err(CliError::Input("settings.gauss_steps needs at least two positive steps".into()));
        }
        if !(s.ricci_eps > 0.0) {
            return Err(CliError::Input("settings.ricci_eps must be positive".into()));
        }
        self.collars()?;
        Ok(())
    }

    pub fn collars(&self) -> CliResult<Collars> {
        let h2 = self.collars.right.build(self.dimension)?;
        let h1 = match &self.collars.left {
            Some(left) => left.build(self.dimension)?.mirror(),
            None => h2.mirror(),
        };
        Ok(Collars { h1, h2 })
    }

    pub fn expected(&self, check: CheckName) -> Option<Outcome> {
        self.expect.get(&check).copied()
    }
}
