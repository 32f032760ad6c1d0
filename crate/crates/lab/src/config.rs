//! Experiment configuration: a JSON object whose fields are all optional;
//! each experiment fills what is missing with its documented defaults.

use std::path::Path;

use mclab_core::MassVector;
use serde::{Deserialize, Serialize};

use crate::error::{config_err, LabResult};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cstar: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    /// Number of random instances for scan experiments.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instances: Option<usize>,
    /// Value of `D_2` in the negative-time bound.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d2: Option<f64>,
    /// Time-grid points for trapezoidal integrals.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_points: Option<usize>,
    /// Pieces per ground block in `grind-domination`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pieces: Option<usize>,
    /// Sizes for experiments that sweep a length (N, n, or truncation length).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sizes: Option<Vec<usize>>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> LabResult<Self> {
        serde_json::from_str(text).map_err(|e| config_err!("invalid config JSON: {e}"))
    }

    pub fn load(path: &Path) -> LabResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err!("cannot read config {}: {e}", path.display()))?;
        Self::from_json(&text)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn reps_or(&self, default: usize) -> LabResult<usize> {
        match self.reps.unwrap_or(default) {
            r if r >= 2 => Ok(r),
            r => Err(config_err!("reps must be at least 2, got {r}")),
        }
    }

    pub fn t_or(&self, default: f64) -> f64 {
        self.t.unwrap_or(default)
    }

    pub fn kappa_or(&self, default: f64) -> f64 {
        self.kappa.unwrap_or(default)
    }

    pub fn grid_step_or(&self, default: f64) -> LabResult<f64> {
        match self.grid_step.unwrap_or(default) {
            h if h > 0.0 && h.is_finite() => Ok(h),
            h => Err(config_err!("grid_step must be positive, got {h}")),
        }
    }

    pub fn instances_or(&self, default: usize) -> LabResult<usize> {
        match self.instances.unwrap_or(default) {
            0 => Err(config_err!("instances must be at least 1")),
            n => Ok(n),
        }
    }

    /// `x` if given, validated.
    pub fn x_vector(&self) -> LabResult<Option<MassVector>> {
        self.x.clone().map(mass).transpose()
    }

    /// `c` if given, else `default`.
    pub fn c_or(&self, default: &[f64]) -> LabResult<MassVector> {
        mass(self.c.clone().unwrap_or_else(|| default.to_vec()))
    }
}

pub fn mass(v: Vec<f64>) -> LabResult<MassVector> {
    Ok(MassVector::ord(v)?)
}
