use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::output::{fmt_f64, write_atomic};

/// How a measured value is compared with its bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    /// `measured < bound`.
    Below,
    /// `measured > bound`.
    Above,
    /// Reported only.
    Report,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    pub relation: Relation,
    pub hard: bool,
    pub passed: bool,
}

impl Check {
    /// Passes iff `measured < bound` (strict, so a zero tolerance always fails).
    pub fn below(name: impl Into<String>, measured: f64, bound: f64) -> Check {
        Check {
            name: name.into(),
            measured,
            bound,
            relation: Relation::Below,
            hard: true,
            passed: measured < bound,
        }
    }

    pub fn above(name: impl Into<String>, measured: f64, bound: f64) -> Check {
        Check {
            name: name.into(),
            measured,
            bound,
            relation: Relation::Above,
            hard: true,
            passed: measured > bound,
        }
    }

    pub fn report(name: impl Into<String>, measured: f64, reference: f64) -> Check {
        Check {
            name: name.into(),
            measured,
            bound: reference,
            relation: Relation::Report,
            hard: false,
            passed: true,
        }
    }

    pub fn flag(name: impl Into<String>, ok: bool) -> Check {
        Check {
            name: name.into(),
            measured: ok as u8 as f64,
            bound: 0.5,
            relation: Relation::Above,
            hard: true,
            passed: ok,
        }
    }
}

pub fn failed_hard(checks: &[Check]) -> usize {
    checks.iter().filter(|c| c.hard && !c.passed).count()
}

pub fn checks_csv(checks: &[Check]) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["name", "measured", "bound", "relation", "hard", "passed"])?;
    for c in checks {
        let rel = match c.relation {
            Relation::Below => "below",
            Relation::Above => "above",
            Relation::Report => "report",
        };
        w.write_record([
            c.name.clone(),
            fmt_f64(c.measured),
            fmt_f64(c.bound),
            rel.to_string(),
            c.hard.to_string(),
            c.passed.to_string(),
        ])?;
    }
    Ok(w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?)
}

/// Outcome of [`crate::run`]. Everything except `wall_clock_s` is a pure
/// function of the config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub checks: Vec<Check>,
    /// Artifact file names, relative to the output directory.
    pub artifacts: Vec<String>,
    #[serde(skip)]
    pub wall_clock_s: f64,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        failed_hard(&self.checks) == 0
    }

    /// `report.json`, `checks.csv` and the separate `timing.json`.
    pub fn write(&self, dir: &Path) -> CliResult<()> {
        let json = serde_json::to_vec_pretty(self).map_err(std::io::Error::other)?;
        write_atomic(&dir.join("report.json"), &json)?;
        write_atomic(&dir.join("checks.csv"), &checks_csv(&self.checks)?)?;
        let timing = serde_json::json!({ "wall_clock_s": self.wall_clock_s });
        write_atomic(&dir.join("timing.json"), timing.to_string().as_bytes())?;
        Ok(())
    }
}
