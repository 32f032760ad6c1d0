//! Experiment harness for multiplicative coalescent simulations: named,
//! seeded batch jobs that write per-replicate CSV data and a JSON summary
//! of estimates, bound checks and verdicts.

// `!(v > 0.0)` style checks are used on purpose so that NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiments;
pub mod pvalue;
pub mod report;
pub mod runner;

use std::path::{Path, PathBuf};
use std::time::Instant;

pub use config::ExperimentConfig;
pub use error::{LabError, LabResult};
pub use experiments::{run_experiment, CATALOG};
pub use report::Report;
pub use runner::Runner;

/// Command-line level inputs; flags override the config file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub experiment: String,
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub reps: Option<usize>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
}

/// A finished run.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub config: ExperimentConfig,
    pub out_dir: PathBuf,
    pub runtime_seconds: f64,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.report.passed()
    }

    /// Process exit code: 0 when every verdict passes, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }
}

/// Merges flags into the config file contents.
pub fn resolve_config(opts: &RunOptions) -> LabResult<ExperimentConfig> {
    let mut cfg = match &opts.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    match &cfg.experiment {
        Some(name) if *name != opts.experiment => {
            return Err(error::config_err!(
                "config names experiment '{name}' but '{}' was requested",
                opts.experiment
            ))
        }
        _ => cfg.experiment = Some(opts.experiment.clone()),
    }
    if let Some(seed) = opts.seed {
        cfg.seed = Some(seed);
    }
    if let Some(reps) = opts.reps {
        cfg.reps = Some(reps);
    }
    if let Some(out) = &opts.out {
        cfg.out = Some(out.display().to_string());
    }
    Ok(cfg)
}

/// Runs the experiment and writes `replicates.csv` and `summary.json`.
pub fn execute(opts: &RunOptions) -> LabResult<Outcome> {
    let config = resolve_config(opts)?;
    let runner = Runner::new(opts.threads)?;
    let start = Instant::now();
    let report = run_experiment(&opts.experiment, &config, &runner)?;
    let runtime_seconds = start.elapsed().as_secs_f64();
    let out_dir = config
        .out
        .as_deref()
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new("mclab-out").join(&opts.experiment));
    report.write_all(
        &out_dir,
        &opts.experiment,
        &config,
        config.seed(),
        runtime_seconds,
    )?;
    Ok(Outcome {
        report,
        config,
        out_dir,
        runtime_seconds,
    })
}
