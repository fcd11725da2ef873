//! Report files written for each run.
//!
//! Layout under `<root>/<scenario name>/`:
//!
//! * `report.json`: schema version, the scenario as parsed, one entry per
//!   check (outcome, expectation, summary, details), exit code. Contains no
//!   timestamps, so identical scenarios give byte-identical reports.
//! * `metadata.json`: generation time and tool version.
//! * `rates.csv`: `quantity,claim,eps,deviation,slope`, when the rate suite ran.
//! * `search_trace.csv`: `stage,eps,nu,min_value,passed,note`, when a search ran.
//! * `profile.csv`: `metric,region,t,min_value`, the curvature minimum over
//!   the cross-section nodes along `t`, when a certificate or search ran.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::pipeline::{CheckResult, RunOutput};
use crate::scenario::Scenario;

pub const SCHEMA_VERSION: u32 = 1;
/// Environment variable holding the output root.
pub const OUT_ENV: &str = "COLLAR_GLUE_OUT";
pub const DEFAULT_OUT: &str = "collar-glue-out";

#[derive(Serialize)]
pub struct Report<'a> {
    pub schema_version: u32,
    pub command: &'a str,
    pub scenario: &'a Scenario,
    pub checks: &'a [CheckResult],
    pub exit_code: i32,
    pub expectations_met: bool,
}

pub fn render_report(sc: &Scenario, command: &str, out: &RunOutput) -> CliResult<String> {
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command,
        scenario: sc,
        checks: &out.checks,
        exit_code: out.exit_code(),
        expectations_met: out.expectations_met(),
    };
    serde_json::to_string_pretty(&report)
        .map(|s| s + "\n")
        .map_err(|e| CliError::Input(format!("cannot serialise report: {e}")))
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}

fn csv_text(write_rows: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(vec![]);
    write_rows(&mut w).map_err(|e| CliError::Input(format!("csv: {e}")))?;
    let bytes = w.into_inner().map_err(|e| CliError::Input(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

/// Writes every report file and returns the scenario's output directory.
pub fn write_outputs(root: &Path, sc: &Scenario, command: &str, out: &RunOutput) -> CliResult<PathBuf> {
    let dir = root.join(&sc.name);
    fs::create_dir_all(&dir).map_err(|e| CliError::io(format!("creating {}", dir.display()), e))?;
    write(&dir.join("report.json"), &render_report(sc, command, out)?)?;
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let meta = json!({
        "generated_at_unix": stamp,
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "schema_version": SCHEMA_VERSION,
        "command": command,
    });
    write(&dir.join("metadata.json"), &(serde_json::to_string_pretty(&meta).expect("plain json") + "\n"))?;

    if let Some(rates) = &out.artifacts.rates {
        let text = csv_text(|w| {
            w.write_record(["quantity", "claim", "eps", "deviation", "slope"])?;
            for r in rates {
                let claim = serde_json::to_value(r.claim).expect("plain enum");
                for (e, d) in r.eps.iter().zip(&r.deviations) {
                    w.write_record([
                        r.name.clone(),
                        claim.as_str().unwrap_or_default().to_string(),
                        e.to_string(),
                        d.to_string(),
                        opt(r.slope),
                    ])?;
                }
            }
            Ok(())
        })?;
        write(&dir.join("rates.csv"), &text)?;
    }
    if let Some(search) = &out.artifacts.search {
        let text = csv_text(|w| {
            w.write_record(["stage", "eps", "nu", "min_value", "passed", "note"])?;
            for a in &search.trace {
                let stage = serde_json::to_value(a.stage).expect("plain enum");
                w.write_record([
                    stage.as_str().unwrap_or_default().to_string(),
                    a.eps.to_string(),
                    opt(a.nu),
                    opt(a.min_value),
                    a.passed.to_string(),
                    a.note.clone().unwrap_or_default(),
                ])?;
            }
            Ok(())
        })?;
        write(&dir.join("search_trace.csv"), &text)?;
    }
    if !out.artifacts.profile.is_empty() {
        let text = csv_text(|w| {
            for row in &out.artifacts.profile {
                w.serialize(row)?;
            }
            Ok(())
        })?;
        write(&dir.join("profile.csv"), &text)?;
    }
    Ok(dir)
}
