//! Experiment output: a per-replicate table plus named estimates, bound
//! checks and verdicts, written as `replicates.csv` and `summary.json`.

use std::fmt;
use std::fs;
use std::path::Path;

use mclab_core::moments::BoundReport;
use mclab_core::stats::EstimateWithCI;
use serde::Serialize;
use serde_json::Value as Json;

use crate::config::ExperimentConfig;
use crate::error::LabResult;

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    Bool(bool),
    Str(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            // shortest round-trip representation
            Value::Float(v) => write!(f, "{v:?}"),
            Value::Bool(v) => write!(f, "{v}"),
            Value::Str(v) => f.write_str(v),
        }
    }
}

macro_rules! impl_from {
    ($($t:ty => $variant:ident as $conv:ty),* $(,)?) => {
        $(impl From<$t> for Value {
            fn from(v: $t) -> Self {
                Value::$variant(v as $conv)
            }
        })*
    };
}

impl_from!(i64 => Int as i64, i32 => Int as i64, u32 => Int as i64, u64 => Int as i64, usize => Int as i64,
           f64 => Float as f64);

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Str(v.to_owned())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Str(v)
    }
}

/// Builds a row from heterogeneous cells.
#[macro_export]
macro_rules! row {
    ($($cell:expr),* $(,)?) => {
        vec![$($crate::report::Value::from($cell)),*]
    };
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub name: String,
    pub mean: f64,
    pub std_error: f64,
    pub reps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bound {
    pub name: String,
    pub bound: f64,
    pub mean: f64,
    pub std_error: f64,
    /// `(bound − mean) / SE`; `null` in JSON when infinite.
    pub slack_sigmas: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    pub estimates: Vec<Estimate>,
    pub bounds: Vec<Bound>,
    pub verdicts: Vec<Verdict>,
    /// Resolved parameters, defaults included.
    pub parameters: serde_json::Map<String, Json>,
    /// Test statistics and other scalar outcomes.
    pub metrics: serde_json::Map<String, Json>,
}

impl Report {
    pub fn new(columns: &[&'static str]) -> Self {
        Report {
            columns: columns.to_vec(),
            ..Default::default()
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Json::Null);
        self.parameters.insert(key.to_owned(), v);
    }

    pub fn metric(&mut self, key: impl Into<String>, value: f64) {
        self.metrics.insert(key.into(), serde_json::json!(value));
    }

    pub fn get_metric(&self, key: &str) -> Option<f64> {
        self.metrics.get(key).and_then(Json::as_f64)
    }

    pub fn push_row(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn estimate(&mut self, name: impl Into<String>, e: &EstimateWithCI) {
        self.estimates.push(Estimate {
            name: name.into(),
            mean: e.mean,
            std_error: e.std_error,
            reps: e.reps,
        });
    }

    /// Records a bound check and the matching verdict.
    pub fn bound(&mut self, name: impl Into<String>, b: &BoundReport) {
        let name = name.into();
        self.bounds.push(Bound {
            name: name.clone(),
            bound: b.bound,
            mean: b.estimate.mean,
            std_error: b.estimate.std_error,
            slack_sigmas: b.slack_sigmas,
            pass: b.pass,
        });
        let detail = format!(
            "mean {} with SE {}: mean + 3 SE = {} vs bound {}",
            b.estimate.mean,
            b.estimate.std_error,
            b.estimate.mean + 3.0 * b.estimate.std_error,
            b.bound
        );
        self.verdict(name, b.pass, detail);
    }

    pub fn verdict(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.verdicts.push(Verdict {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn find_verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    pub fn find_estimate(&self, name: &str) -> Option<&Estimate> {
        self.estimates.iter().find(|e| e.name == name)
    }

    pub fn write_csv(&self, path: &Path) -> LabResult<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary(
        &self,
        experiment: &str,
        config: &ExperimentConfig,
        seed: u64,
        runtime_seconds: f64,
    ) -> Json {
        serde_json::json!({
            "experiment": experiment,
            "seed": seed,
            "config": config,
            "parameters": self.parameters,
            "estimates": self.estimates,
            "bounds": self.bounds,
            "metrics": self.metrics,
            "verdicts": self.verdicts,
            "passed": self.passed(),
            "runtime_seconds": runtime_seconds,
        })
    }

    /// Writes both files into `dir`, creating it if needed.
    pub fn write_all(
        &self,
        dir: &Path,
        experiment: &str,
        config: &ExperimentConfig,
        seed: u64,
        runtime_seconds: f64,
    ) -> LabResult<()> {
        fs::create_dir_all(dir)?;
        self.write_csv(&dir.join("replicates.csv"))?;
        let summary = self.summary(experiment, config, seed, runtime_seconds);
        fs::write(
            dir.join("summary.json"),
            serde_json::to_string_pretty(&summary)? + "\n",
        )?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cells_format_stably() {
        assert_eq!(Value::from(0.1).to_string(), "0.1");
        assert_eq!(Value::from(1e-7).to_string(), "1e-7");
        assert_eq!(Value::from(3usize).to_string(), "3");
        assert_eq!(Value::from(true).to_string(), "true");
    }

    #[test]
    fn verdicts_aggregate() {
        let mut r = Report::new(&["a"]);
        assert!(r.passed());
        r.verdict("x", true, "");
        r.verdict("y", false, "");
        assert!(!r.passed());
        assert!(r.find_verdict("y").is_some());
    }
}
