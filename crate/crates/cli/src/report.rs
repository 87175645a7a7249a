//! Report schema: one record per check, residuals always included, with an
//! environment stamp that `--stable-output` drops so identical runs are
//! byte-identical.

use serde::{Deserialize, Serialize};

pub const REPORT_SCHEMA: &str = "poissonization-report/1";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Record {
    pub name: String,
    pub computed: f64,
    pub reference: f64,
    pub residual: f64,
    pub pass: bool,
}

impl Record {
    pub fn residual_check(name: impl Into<String>, computed: f64, reference: f64, tol: f64) -> Self {
        let residual = (computed - reference).abs();
        Record { name: name.into(), computed, reference, residual, pass: residual <= tol }
    }

    pub fn bound_check(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Record {
            name: name.into(),
            computed: value,
            reference: bound,
            residual: (value - bound).max(0.0),
            pass: value <= bound,
        }
    }

    pub fn boolean(name: impl Into<String>, pass: bool) -> Self {
        Record {
            name: name.into(),
            computed: if pass { 1.0 } else { 0.0 },
            reference: 1.0,
            residual: if pass { 0.0 } else { 1.0 },
            pass,
        }
    }

    pub fn failure(name: impl Into<String>, message: &str) -> Self {
        Record {
            name: format!("{} [{message}]", name.into()),
            computed: f64::NAN,
            reference: 0.0,
            residual: f64::INFINITY,
            pass: false,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Environment {
    pub package_version: String,
    pub wall_ms: u128,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub suite: String,
    pub seed: u64,
    pub pass: bool,
    pub records: Vec<Record>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub environment: Option<Environment>,
}

impl Report {
    pub fn new(suite: &str, seed: u64, records: Vec<Record>, stable: bool, wall_ms: u128) -> Self {
        let pass = records.iter().all(|r| r.pass);
        Report {
            schema: REPORT_SCHEMA.into(),
            suite: suite.into(),
            seed,
            pass,
            records,
            environment: if stable {
                None
            } else {
                Some(Environment {
                    package_version: env!("CARGO_PKG_VERSION").into(),
                    wall_ms,
                })
            },
        }
    }
}

/// Convergence table emitted as CSV alongside the JSON report.
#[derive(Clone, Debug, Default)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|v| format!("{v:.17e}")).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}
