//! The JSON run summary.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use calvs_core::bounds::{check_inequality, BoundReport};
use serde::{Deserialize, Serialize};

use crate::error::{ExpError, Result};
use crate::output::Table;

/// Bumped on any change to the summary layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "==")]
    Eq,
}

/// One assertion: `value <relation> threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub threshold: f64,
    pub passed: bool,
    /// Binomial standard error of a frequency or order statistic, when statistical.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub std_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub schema_version: u32,
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    /// Bound comparisons, asserted or charted.
    pub reports: Vec<BoundReport>,
    pub replicates: BTreeMap<String, usize>,
    pub exclusions: BTreeMap<String, usize>,
    /// Estimated quantities worth keeping next to the checks.
    pub values: BTreeMap<String, f64>,
    pub wall_time_s: f64,
}

/// Everything a command produces before it is written out.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub reports: Vec<BoundReport>,
    pub replicates: BTreeMap<String, usize>,
    pub exclusions: BTreeMap<String, usize>,
    pub values: BTreeMap<String, f64>,
    pub tables: Vec<Table>,
}

impl Outcome {
    fn check(&mut self, name: &str, value: f64, relation: Relation, threshold: f64, std_error: Option<f64>) -> Result<()> {
        if value.is_nan() || threshold.is_nan() {
            return Err(ExpError::Core(calvs_core::Error::NonFinite("check operand")));
        }
        if self.checks.iter().any(|c| c.name == name) {
            return Err(ExpError::Config(format!("check `{name}` recorded twice")));
        }
        let passed = match relation {
            Relation::Le => value <= threshold,
            Relation::Ge => value >= threshold,
            Relation::Eq => value == threshold,
        };
        self.checks.push(Check {
            name: name.to_string(),
            value,
            relation,
            threshold,
            passed,
            std_error,
        });
        Ok(())
    }

    pub fn assert_le(&mut self, name: &str, value: f64, threshold: f64) -> Result<()> {
        self.check(name, value, Relation::Le, threshold, None)
    }

    pub fn assert_ge(&mut self, name: &str, value: f64, threshold: f64) -> Result<()> {
        self.check(name, value, Relation::Ge, threshold, None)
    }

    pub fn assert_eq(&mut self, name: &str, value: f64, expected: f64) -> Result<()> {
        self.check(name, value, Relation::Eq, expected, None)
    }

    /// A frequency check reporting `sqrt(p (1 - p) / n)` at the threshold.
    pub fn assert_frequency(&mut self, name: &str, freq: f64, floor: f64, n: usize) -> Result<()> {
        let p = floor.clamp(0.0, 1.0);
        let se = (p * (1.0 - p) / n.max(1) as f64).sqrt();
        self.check(name, freq, Relation::Ge, floor, Some(se))
    }

    /// Records `lhs <= rhs + tol` as both a bound report and a check.
    pub fn assert_bound(&mut self, name: &str, lhs: f64, rhs: f64, tol: f64, inputs: &[(&str, f64)]) -> Result<()> {
        let mut rep = check_inequality(name, lhs, rhs + tol)?;
        rep.rhs = rhs;
        for (k, v) in inputs {
            rep = rep.with_input(k, *v);
        }
        rep = rep.with_input("tolerance", tol);
        self.reports.push(rep);
        self.assert_le(name, lhs, rhs + tol)
    }

    /// A bound comparison that is reported but not asserted.
    pub fn chart(&mut self, name: &str, lhs: f64, rhs: f64) -> Result<()> {
        self.reports.push(check_inequality(name, lhs, rhs)?);
        Ok(())
    }

    pub fn value(&mut self, key: impl Into<String>, v: f64) {
        self.values.insert(key.into(), v);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn summary(&self, suite: &str, wall_time_s: f64) -> SuiteSummary {
        SuiteSummary {
            schema_version: SCHEMA_VERSION,
            suite: suite.to_string(),
            passed: self.passed(),
            checks: self.checks.clone(),
            reports: self.reports.clone(),
            replicates: self.replicates.clone(),
            exclusions: self.exclusions.clone(),
            values: self.values.clone(),
            wall_time_s,
        }
    }
}

impl SuiteSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join("summary.json");
        fs::write(&path, self.to_json() + "\n").map_err(|source| ExpError::Io { path, source })
    }
}
