//! Runs the checks declared by a scenario and collects their outcomes.

use collar_glue::gluing::{
    assemble_glued, boundary_condition_check, convexity_kernel_check, spline_family, GluedMetric,
};
use collar_glue::metric::{CollarChart, FiniteDifference, Point, SliceFamily};
use collar_glue::verifier::{
    almost_nonneg_check, certify, epsilon_nu_search, eta_frame_report, gauss_check, gauss_order,
    interpolation_bound_check, rate_suite, rebuild, ricci_limit, totally_geodesic_check, RateGrid, RateReport,
    Regioned, SearchReport, INTERPOLATION_FLOOR,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::catalogue::CheckName;
use crate::error::{CliError, CliResult};
use crate::scenario::{Collars, Outcome, Scenario};

/// Interface jumps at or below this count as continuous.
pub const INTERFACE_TOL: f64 = 1e-12;
/// Gauss residuals below this at the widest step are rounding, and no order
/// is fitted to them.
pub const GAUSS_ROUNDING: f64 = 1e-9;
/// Number of planes used for the step-order fit of the Gauss residual.
const GAUSS_ORDER_PLANES: usize = 30;

/// Which checks of a scenario to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    /// Everything the scenario declares.
    All,
    /// The certification checks only; certify and search when none are declared.
    Certification,
    /// The rate suite only, declared or not.
    Rates,
}

impl Selection {
    fn checks(self, sc: &Scenario) -> Vec<CheckName> {
        use CheckName::*;
        match self {
            Selection::All => sc.checks.clone(),
            Selection::Certification => {
                let picked: Vec<CheckName> = sc
                    .checks
                    .iter()
                    .copied()
                    .filter(|c| matches!(c, BoundaryCondition | C1Interface | Certify | EpsilonNuSearch | Stability))
                    .collect();
                if picked.is_empty() {
                    vec![Certify, EpsilonNuSearch]
                } else {
                    picked
                }
            }
            Selection::Rates => vec![RateSuite],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: CheckName,
    pub outcome: Outcome,
    pub expected: Option<Outcome>,
    /// One-line human summary.
    pub summary: String,
    pub details: Value,
}

impl CheckResult {
    pub fn meets_expectation(&self) -> bool {
        self.expected.map_or(true, |e| e == self.outcome)
    }
}

/// Curvature minimum over the cross-section nodes at one `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileRow {
    pub metric: &'static str,
    pub region: &'static str,
    pub t: f64,
    pub min_value: f64,
}

#[derive(Debug, Default)]
pub struct RunArtifacts {
    pub rates: Option<Vec<RateReport>>,
    pub search: Option<SearchReport>,
    pub profile: Vec<ProfileRow>,
}

pub struct RunOutput {
    pub checks: Vec<CheckResult>,
    pub artifacts: RunArtifacts,
}

impl RunOutput {
    /// 2 if any check is inconclusive, else 1 if any failed, else 0.
    pub fn exit_code(&self) -> i32 {
        if self.checks.iter().any(|c| c.outcome == Outcome::Inconclusive) {
            2
        } else if self.checks.iter().any(|c| c.outcome == Outcome::Fail) {
            1
        } else {
            0
        }
    }

    pub fn expectations_met(&self) -> bool {
        self.checks.iter().all(CheckResult::meets_expectation)
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn pass_fail(ok: bool) -> Outcome {
    if ok {
        Outcome::Pass
    } else {
        Outcome::Fail
    }
}

struct Runner<'a> {
    sc: &'a Scenario,
    collars: &'a Collars,
    artifacts: RunArtifacts,
}

type Checked = (Outcome, String, Value);

impl<'a> Runner<'a> {
    fn x_nodes(&self) -> Vec<Vec<f64>> {
        self.sc.sampling.section_nodes(self.collars.h2.section())
    }

    fn glued(&self) -> CliResult<GluedMetric> {
        Ok(assemble_glued(&self.collars.h1, &self.collars.h2, &self.sc.gluing)?)
    }

    fn search(&mut self) -> CliResult<&SearchReport> {
        if self.artifacts.search.is_none() {
            let sc = self.sc;
            let report = epsilon_nu_search(
                &self.collars.h1,
                &self.collars.h2,
                sc.mode,
                sc.k,
                sc.gluing.kappa,
                &sc.gluing,
                &sc.schedule,
                &sc.sampling,
            )?;
            self.artifacts.search = Some(report);
        }
        Ok(self.artifacts.search.as_ref().expect("search just ran"))
    }

    fn run(&mut self, check: CheckName) -> CliResult<Checked> {
        let sc = self.sc;
        let collars: &'a Collars = self.collars;
        let (h1, h2) = (&collars.h1, &collars.h2);
        let settings = &sc.settings;
        Ok(match check {
            CheckName::BoundaryCondition => {
                let r = boundary_condition_check(h1, h2, sc.mode, sc.k, &self.x_nodes())?;
                let summary = format!("boundary margin {:.6e}", r.margin);
                (pass_fail(r.satisfied), summary, to_value(&r))
            }
            CheckName::C1Interface => {
                let g = self.glued()?;
                let (j0, j1) = (g.interface_jump(0), g.interface_jump(1));
                let bound = g.section().coefficient_bound();
                let summary = format!("interface jumps: value {j0:.3e}, first derivative {j1:.3e}");
                let ok = j0 * bound <= INTERFACE_TOL && j1 * bound <= INTERFACE_TOL;
                (pass_fail(ok), summary, json!({ "eps": g.eps(), "value_jump": j0, "derivative_jump": j1 }))
            }
            CheckName::ConvexityKernel => {
                let r = convexity_kernel_check(
                    h1,
                    h2,
                    sc.gluing.eps,
                    &self.x_nodes(),
                    settings.convexity_pairs,
                    21,
                    settings.seed,
                )?;
                let summary = format!("min second difference {:.3e}", r.min_second_difference);
                (pass_fail(r.passed), summary, to_value(&r))
            }
            CheckName::Certify => {
                let g = self.glued()?;
                let c = certify(&g, sc.mode, sc.k, sc.gluing.kappa, &sc.sampling)?;
                if self.artifacts.profile.is_empty() {
                    self.artifacts.profile = profile(&g, "c1", sc)?;
                }
                let summary = format!(
                    "C1 metric at eps {}: min {} = {:.6} (kappa {}) in region {}",
                    g.eps(),
                    sc.mode.name(),
                    c.min_value,
                    c.kappa,
                    c.witness_region.name()
                );
                (pass_fail(c.passed), summary, to_value(&c))
            }
            CheckName::EpsilonNuSearch => {
                let r = self.search()?.clone();
                let checked = match r.certified() {
                    Some((p, c)) => {
                        let s = rebuild(h1, h2, p)?;
                        self.artifacts.profile = profile(&s, "smooth", sc)?;
                        let summary =
                            format!("certified at eps {}, nu {}: min {:.6} > {}", p.eps, p.nu, c.min_value, c.kappa);
                        (Outcome::Pass, summary, to_value(&r))
                    }
                    None => (Outcome::Inconclusive, inconclusive_reason(&r), to_value(&r)),
                };
                checked
            }
            CheckName::Stability => {
                let r = self.search()?.clone();
                match r.certified() {
                    None => (Outcome::Inconclusive, inconclusive_reason(&r), Value::Null),
                    Some((p, c)) => {
                        let s = rebuild(h1, h2, p)?;
                        let doubled = sc.sampling.doubled(s.section().dim());
                        let c2 = certify(&s, sc.mode, sc.k, sc.gluing.kappa, &doubled)?;
                        let change = (c2.margin() - c.margin()).abs() / c.margin().abs();
                        let ok = c2.passed && change < settings.stability_tolerance;
                        let summary =
                            format!("margin {:.6} -> {:.6} on the doubled grid ({:.2}% change)", c.margin(), c2.margin(), 100.0 * change);
                        let details = json!({
                            "margin": c.margin(),
                            "doubled_margin": c2.margin(),
                            "relative_change": change,
                            "tolerance": settings.stability_tolerance,
                            "doubled_certificate": to_value(&c2),
                        });
                        (pass_fail(ok), summary, details)
                    }
                }
            }
            CheckName::RateSuite => {
                let grid = RateGrid {
                    x_nodes: self.x_nodes(),
                    t_count: settings.rate_t_count,
                    directions: settings.rate_directions,
                };
                let reports = rate_suite(h1, h2, &settings.rate_eps, &grid)?;
                let ok = reports.iter().all(|r| r.passed);
                let summary = reports
                    .iter()
                    .map(|r| match r.slope {
                        Some(s) => format!("{} {s:.3}", r.name),
                        None => format!("{} zero", r.name),
                    })
                    .collect::<Vec<_>>()
                    .join(", ");
                let details = to_value(&reports);
                self.artifacts.rates = Some(reports);
                (pass_fail(ok), format!("slopes: {summary}"), details)
            }
            CheckName::RicciLimit => {
                let r = ricci_limit(h1, h2, settings.ricci_eps, &self.x_nodes())?;
                let ok = r.max_relative_deviation <= settings.ricci_tolerance;
                let summary = format!(
                    "2 eps Ric at eps {}: max relative deviation {:.3}%",
                    r.eps,
                    100.0 * r.max_relative_deviation
                );
                (pass_fail(ok), summary, to_value(&r))
            }
            CheckName::GaussCheck => {
                let f = spline_family(h1, h2, sc.gluing.eps)?;
                let r = gauss_check(&f, settings.gauss_planes, FiniteDifference::default(), settings.seed)?;
                let o = gauss_order(&f, GAUSS_ORDER_PLANES, &settings.gauss_steps, settings.seed)?;
                let widest = o.max_residuals.first().copied().unwrap_or(0.0);
                let order_ok = widest <= GAUSS_ROUNDING || o.order.is_some_and(|q| q >= settings.gauss_min_order);
                let ok = r.max_residual <= settings.gauss_tolerance && order_ok;
                let summary = format!(
                    "max residual {:.3e} over {} planes; step order {}",
                    r.max_residual,
                    r.planes - r.degenerate,
                    o.order.map_or("n/a".into(), |q| format!("{q:.3}"))
                );
                (pass_fail(ok), summary, json!({ "residual": to_value(&r), "order": to_value(&o) }))
            }
            CheckName::InterpolationBound => {
                let r = interpolation_bound_check(
                    h1,
                    h2,
                    sc.k,
                    &settings.rate_eps,
                    &self.x_nodes(),
                    settings.lemma_t_count,
                    settings.frames,
                    settings.seed,
                )?;
                let worst = r.violation.iter().copied().fold(0.0, f64::max);
                let order = match r.violation_slope {
                    _ if worst <= INTERPOLATION_FLOOR => "rounding level".to_string(),
                    Some(s) => format!("order {s:.3}"),
                    None => "n/a".to_string(),
                };
                let summary = format!("largest violation {worst:.3e} ({order})");
                (pass_fail(r.passed), summary, to_value(&r))
            }
            CheckName::EtaFrames => {
                let r = eta_frame_report(
                    h1,
                    h2,
                    &settings.rate_eps,
                    &self.x_nodes(),
                    settings.lemma_t_count,
                    settings.frames,
                    settings.seed,
                )?;
                let summary = format!(
                    "eta {:?}; order {}",
                    r.eta.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>(),
                    r.slope.map_or("n/a".into(), |s| format!("{s:.3}"))
                );
                (pass_fail(r.passed), summary, to_value(&r))
            }
            CheckName::TotallyGeodesic => {
                let r = totally_geodesic_check(h1, h2, &sc.gluing, &self.x_nodes(), 21)?;
                let summary = match &r.precondition_violation {
                    Some(v) => format!("precondition violated: {v}"),
                    None => format!(
                        "nu {}: symmetry defect {:.3e}, |II(0)| {:.3e}",
                        r.nu, r.symmetry_defect, r.second_fundamental_form
                    ),
                };
                (pass_fail(r.passed), summary, to_value(&r))
            }
            CheckName::AlmostNonneg => {
                let r = almost_nonneg_check(
                    h1,
                    h2,
                    sc.mode,
                    sc.k,
                    sc.gluing.delta,
                    &sc.gluing,
                    &sc.schedule,
                    &sc.sampling,
                    settings.diameter_nodes,
                )?;
                let (outcome, summary) = if let Some(v) = &r.precondition_violation {
                    (Outcome::Fail, format!("precondition violated: {v}"))
                } else if r.inconclusive {
                    (Outcome::Inconclusive, format!("search inconclusive at kappa {:.3e}", r.kappa.unwrap_or(f64::NAN)))
                } else {
                    let scaled = r.scaled_minimum.unwrap_or(f64::NAN);
                    (
                        pass_fail(r.passed),
                        format!("min * diam^2 = {scaled:.4e} against -delta = {:.4e}", -r.delta),
                    )
                };
                (outcome, summary, to_value(&r))
            }
        })
    }
}

fn inconclusive_reason(r: &SearchReport) -> String {
    match &r.outcome {
        collar_glue::verifier::SearchOutcome::Inconclusive { reason } => format!("inconclusive: {reason}"),
        collar_glue::verifier::SearchOutcome::Certified { .. } => "certified".into(),
    }
}

/// Minimum of the scenario's functional over the cross-section nodes on
/// `profile_t_count` slices of every region.
fn profile<G: Regioned>(g: &G, metric: &'static str, sc: &Scenario) -> CliResult<Vec<ProfileRow>> {
    let xs = sc.sampling.section_nodes(g.section());
    let count = sc.settings.profile_t_count.max(2);
    let mut rows = vec![];
    for piece in g.regions() {
        let ch = CollarChart::with_t_range(piece.family, piece.lo, piece.hi);
        for i in 0..count {
            let t = piece.lo + (piece.hi - piece.lo) * i as f64 / (count - 1) as f64;
            let pts: Vec<Point> = xs.iter().map(|x| Point::new(x.clone(), t)).collect();
            let w = sc.mode.min_over(&ch, sc.k, &pts, &sc.sampling)?;
            rows.push(ProfileRow {
                metric,
                region: piece.region.name(),
                t,
                min_value: w.value,
            });
        }
    }
    Ok(rows)
}

/// Runs the selected checks in declaration order. Numerical errors inside
/// a check make that check fail; input errors abort the run.
pub fn run_checks(sc: &Scenario, selection: Selection) -> CliResult<RunOutput> {
    let collars = sc.collars()?;
    let mut runner = Runner {
        sc,
        collars: &collars,
        artifacts: RunArtifacts::default(),
    };
    let mut checks = vec![];
    for name in selection.checks(sc) {
        let (outcome, summary, details) = match runner.run(name) {
            Ok(c) => c,
            Err(CliError::Glue(e)) => (Outcome::Fail, format!("error: {e}"), json!({ "error": e.to_string() })),
            Err(e) => return Err(e),
        };
        checks.push(CheckResult {
            name,
            outcome,
            expected: sc.expected(name),
            summary,
            details,
        });
    }
    Ok(RunOutput {
        checks,
        artifacts: runner.artifacts,
    })
}
