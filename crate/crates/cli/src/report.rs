//! Reports and their on-disk forms. The JSON report is a pure function of
//! the config and seed; wall-clock times go to a separate `timings.json`.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use folner_core::cocycles::Calibration;
use serde::{Deserialize, Serialize};

use crate::config::Format;

pub const REPORT_SCHEMA: u32 = 1;

/// How a criterion's value is judged against its tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = "<")]
    Below,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub name: String,
    /// `None` when the quantity could not be computed; that always fails.
    pub value: Option<f64>,
    pub comparison: Comparison,
    pub tolerance: f64,
    pub passed: bool,
}

impl Criterion {
    pub fn at_most(name: &str, value: f64, tolerance: f64) -> Self {
        Self::judge(name, value, Comparison::AtMost, tolerance)
    }

    pub fn below(name: &str, value: f64, tolerance: f64) -> Self {
        Self::judge(name, value, Comparison::Below, tolerance)
    }

    fn judge(name: &str, value: f64, comparison: Comparison, tolerance: f64) -> Self {
        let value = finite(value);
        let passed = value.is_some_and(|v| match comparison {
            Comparison::AtMost => v <= tolerance,
            Comparison::Below => v < tolerance,
        });
        Self { name: name.into(), value, comparison, tolerance, passed }
    }
}

/// One Følner set of the convergence table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetRow {
    pub set_index: usize,
    pub set_size: usize,
    pub deficiency_r2: f64,
    pub analytic_density: f64,
    pub topological_density: f64,
    pub oracle_density: f64,
    pub abs_diff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub suite: String,
    pub scenario: String,
    pub seed: u64,
    /// SHA-256 of the config file as read.
    pub config_sha256: String,
    pub passed: bool,
    pub analytic: Option<f64>,
    pub topological: Option<f64>,
    pub oracle: Option<f64>,
    pub diff: Option<f64>,
    pub criteria: Vec<Criterion>,
    pub sets: Vec<SetRow>,
    pub details: serde_json::Value,
    pub calibration: Option<Calibration>,
}

impl Report {
    pub fn failing(&self) -> impl Iterator<Item = &Criterion> {
        self.criteria.iter().filter(|c| !c.passed)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    /// `set_index,set_size,deficiency_r2,analytic_density,topological_density,abs_diff`
    /// with every float printed to 17 significant digits.
    pub fn convergence_csv(&self) -> String {
        let mut out = String::from("set_index,set_size,deficiency_r2,analytic_density,topological_density,abs_diff\n");
        for r in &self.sets {
            let _ = writeln!(
                out,
                "{},{},{:.16e},{:.16e},{:.16e},{:.16e}",
                r.set_index, r.set_size, r.deficiency_r2, r.analytic_density, r.topological_density, r.abs_diff
            );
        }
        out
    }

    pub fn criteria_csv(&self) -> String {
        let mut out = String::from("criterion,value,comparison,tolerance,passed\n");
        for c in &self.criteria {
            let value = c.value.map(|v| format!("{v:.16e}")).unwrap_or_default();
            let cmp = match c.comparison {
                Comparison::AtMost => "<=",
                Comparison::Below => "<",
            };
            let _ = writeln!(out, "{},{value},{cmp},{:.16e},{}", c.name, c.tolerance, c.passed);
        }
        out
    }
}

/// Named wall-clock stages, in execution order.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Timings {
    pub stages: Vec<(String, f64)>,
}

impl Timings {
    pub fn record<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = std::time::Instant::now();
        let out = f();
        self.stages.push((stage.to_string(), start.elapsed().as_secs_f64()));
        out
    }
}

pub fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

/// Writes the requested formats into `dir`; returns the files written.
pub fn emit_report(report: &Report, timings: &Timings, dir: &Path, format: Format) -> io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: &str, body: String| -> io::Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, body)?;
        written.push(path);
        Ok(())
    };
    if format.json() {
        put("report.json", report.to_json())?;
    }
    if format.csv() {
        put("convergence.csv", report.convergence_csv())?;
        put("criteria.csv", report.criteria_csv())?;
    }
    let mut t = serde_json::to_string_pretty(timings).expect("timings serialize");
    t.push('\n');
    put("timings.json", t)?;
    Ok(written)
}
