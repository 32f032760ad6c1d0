//! The experiment catalog. Each experiment reads the fields it needs from an
//! [`ExperimentConfig`], fills the rest with the defaults documented in
//! `docs/experiments.md`, and returns a [`Report`].

mod excursions;
mod graphs;
mod moments;

use mclab_core::stats::EstimateWithCI;
use mclab_core::MassVector;
use rand::RngExt;

use crate::config::ExperimentConfig;
use crate::error::{config_err, LabResult};
use crate::report::Report;
use crate::runner::Runner;

pub type ExperimentFn = fn(&ExperimentConfig, &Runner) -> LabResult<Report>;

/// `(name, entry point, one-line description)` for every experiment.
pub const CATALOG: &[(&str, ExperimentFn, &str)] = &[
    (
        "sampler-agreement",
        graphs::sampler_agreement,
        "partition law of both samplers vs exact enumeration",
    ),
    (
        "lemma21-scan",
        graphs::lemma21_scan,
        "pair connection probability vs x_i x_j t/(1 - t|x|^2)",
    ),
    (
        "prop22-scan",
        graphs::prop22_scan,
        "n-point connection probability vs the C_n bound",
    ),
    (
        "bk-verify",
        graphs::bk_verify,
        "disjoint connection vs product of marginals",
    ),
    (
        "lemma31-scan",
        moments::lemma31_scan,
        "E S_n(t) vs the D_n bound",
    ),
    (
        "joint-moments",
        moments::joint_moments,
        "E S_n S_m across truncation lengths",
    ),
    (
        "generator-oracle",
        moments::generator_oracle,
        "closed-form generator vs pair sum",
    ),
    (
        "martingale-residual",
        moments::martingale_residual,
        "g(X(t)) - g(x) - int Gamma g dr has mean 0",
    ),
    (
        "theorem11-moments",
        moments::theorem11_moments,
        "E S_2^{n/2} as the block count grows",
    ),
    (
        "grind-domination",
        moments::grind_domination,
        "ground start dominates the original norm",
    ),
    (
        "negative-time",
        excursions::negative_time,
        "E sum |gamma|^2 vs D_2/(-t)",
    ),
    (
        "sequence-convergence",
        excursions::sequence_convergence,
        "finite coalescents approach excursion lengths",
    ),
    (
        "sigma-tails",
        excursions::sigma_tails,
        "exponential tail of the return time sigma",
    ),
    (
        "shift-identity",
        excursions::shift_identity,
        "pathwise identity of the shifted reflection",
    ),
    (
        "eta-thinning",
        excursions::eta_thinning,
        "thinned path vs shifted increment in law",
    ),
    (
        "col-consistency",
        excursions::col_consistency,
        "colour-and-collapse vs shifted parameters",
    ),
    (
        "v-decomposition",
        excursions::v_decomposition,
        "martingale part of the jump process",
    ),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    CATALOG.iter().map(|(n, _, _)| *n)
}

pub fn run_experiment(name: &str, cfg: &ExperimentConfig, runner: &Runner) -> LabResult<Report> {
    let (_, f, _) = CATALOG.iter().find(|(n, _, _)| *n == name).ok_or_else(|| {
        config_err!(
            "unknown experiment '{name}'; known: {}",
            names().collect::<Vec<_>>().join(", ")
        )
    })?;
    f(cfg, runner)
}

/// `|a − b| < 3·(SE_a + SE_b)`, the joint 3-SE criterion.
fn within_joint_radius(a: &EstimateWithCI, b: &EstimateWithCI) -> (bool, String) {
    let radius = 3.0 * (a.std_error + b.std_error);
    let diff = (a.mean - b.mean).abs();
    (
        diff < radius || diff == 0.0,
        format!(
            "|{} - {}| = {diff} vs joint radius {radius}",
            a.mean, b.mean
        ),
    )
}

/// Random instance with `blocks` in `[min_blocks, max_blocks]`, masses in
/// `[0.05, 2)` and `t‖x‖²` uniform in `(0, window]`.
fn random_instance(
    rng: &mut mclab_core::rng::SimRng,
    min_blocks: usize,
    max_blocks: usize,
    window: f64,
) -> LabResult<(MassVector, f64)> {
    let blocks = rng.random_range(min_blocks..=max_blocks);
    let masses: Vec<f64> = (0..blocks).map(|_| rng.random_range(0.05..2.0)).collect();
    let x = MassVector::ord(masses)?;
    let u: f64 = 1.0 - rng.random::<f64>();
    Ok((x.clone(), u * window / x.s2()))
}

fn sample_estimate(samples: &[f64]) -> LabResult<EstimateWithCI> {
    Ok(EstimateWithCI::from_samples(samples)?)
}
