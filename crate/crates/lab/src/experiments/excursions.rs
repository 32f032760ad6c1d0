//! Excursion-side experiments: negative-time moments, the approximating
//! sequences, the return time σ and its couplings, colour-and-collapse and
//! the decomposition of the jump process.

use mclab_core::excursion::{
    aldous_limic_sequence, aligned_step, decompose_V, eta_thinned_W, excursions_to_resolution,
    excursions_until_extinction, resolution_horizon, sample_V, sample_W, shift_identity_check,
    sigma_sample, EtaMode, SequenceMode, Sigma,
};
use mclab_core::moments::{bound_negative_time_with, BoundReport, Sampler};
use mclab_core::operators::{col_consistency_sample, ColConsistency, ColSetup};
use mclab_core::rng::{derive_seed, replicate_seed};
use mclab_core::stats::{ks_two_sample, EstimateWithCI};
use mclab_core::{MassVector, ParamTriple};

use super::{sample_estimate, within_joint_radius};
use crate::config::{mass, ExperimentConfig};
use crate::error::{config_err, LabResult};
use crate::report::Report;
use crate::row;
use crate::runner::Runner;

const P_MIN: f64 = 0.01;
const MAX_CENSORED: f64 = 0.01;

fn fmt_rates(c: &MassVector) -> String {
    format!(
        "({})",
        c.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
    )
}

pub fn negative_time(cfg: &ExperimentConfig, runner: &Runner) -> LabResult<Report> {
    let reps = cfg.reps_or(10_000)?;
    let seed = cfg.seed();
    let kappa = cfg.kappa_or(1.0);
    let h = cfg.grid_step_or(1e-3)?;
    let d2 = cfg.d2.unwrap_or(2.0);
    let rates: Vec<MassVector> = match &cfg.c {
        Some(c) => vec![mass(c.clone())?],
        None => vec![MassVector::empty(), mass(vec![0.5, 0.25])?],
    };
    let times: Vec<f64> = match cfg.t {
        Some(t) if t < 0.0 => vec![t],
        Some(t) => return Err(config_err!("negative-time needs t < 0, got {t}")),
        None => vec![-0.5, -1.0, -2.0],
    };
    let mut report = Report::new(&[
        "case",
        "rep",
        "sum_sq",
        "censored",
        "excursions",
        "sum_sq_half_step",
        "censored_half_step",
    ]);
    report.param("kappa", kappa);
    report.param("grid_step", h);
    report.param("reps", reps);
    report.param("d2", d2);
    report.param("min_len", "5 * grid_step");
    report.param("times", &times);
    report.param(
        "rates",
        rates
            .iter()
            .map(|c| c.masses().to_vec())
            .collect::<Vec<_>>(),
    );

    let mut case = 0u64;
    for c in &rates {
        for &t in &times {
            let p = ParamTriple::new(kappa, t, c.clone())?;
            let label = format!("c={}/t={t}", fmt_rates(c));
            let cseed = derive_seed(seed, case);
            case += 1;
            let runs = runner.map(reps, |r| -> LabResult<_> {
                let s = replicate_seed(cseed, r);
                // the h path is the step-h restriction of the h/2 path
                let coarse = excursions_until_extinction(&p, h, 2, s)?;
                let fine = excursions_until_extinction(&p, h / 2.0, 1, s)?;
                Ok((
                    coarse.sum_sq(),
                    coarse.is_censored(),
                    coarse.excursions.len(),
                    fine.sum_sq(),
                    fine.is_censored(),
                ))
            })?;
            for (r, v) in runs.iter().enumerate() {
                report.push_row(row![label.as_str(), r, v.0, v.1, v.2, v.3, v.4]);
            }
            let coarse = sample_estimate(&runs.iter().map(|v| v.0).collect::<Vec<_>>())?;
            let fine = sample_estimate(&runs.iter().map(|v| v.3).collect::<Vec<_>>())?;
            report.estimate(format!("{label}/sum_sq"), &coarse);
            report.estimate(format!("{label}/sum_sq_half_step"), &fine);
            report.bound(
                format!("{label}/bound"),
                &BoundReport::evaluate(bound_negative_time_with(t, d2)?, coarse),
            );
            let censored = runs.iter().filter(|v| v.1 || v.4).count() as f64 / reps as f64;
            report.metric(format!("{label}/censored_fraction"), censored);
            report.verdict(
                format!("{label}/censoring"),
                censored < MAX_CENSORED,
                format!("censored fraction {censored}"),
            );
            let (ok, detail) = within_joint_radius(&coarse, &fine);
            report.verdict(format!("{label}/refinement"), ok, detail);
        }
    }
    Ok(report)
}

pub fn sequence_convergence(cfg: &ExperimentConfig, runner: &Runner) -> LabResult<Report> {
    let reps = cfg.reps_or(10_000)?;
    let seed = cfg.seed();
    let kappa = cfg.kappa_or(1.0);
    let t = cfg.t_or(-1.0);
    let h = cfg.grid_step_or(2.5e-4)?;
    let c = cfg.c_or(&[])?;
    let sizes = cfg.sizes.clone().unwrap_or_else(|| vec![8, 64, 512]);
    if sizes.len() < 2 || sizes.contains(&0) {
        return Err(config_err!("sizes needs at least two positive entries"));
    }
    let p = ParamTriple::new(kappa, t, c.clone())?;
    let mut report = Report::new(&["source", "rep", "sum_sq"]);
    report.param("kappa", kappa);
    report.param("t", t);
    report.param("c", c.masses());
    report.param("sizes", &sizes);
    report.param("grid_step", h);
    report.param("horizon", resolution_horizon(kappa, t, h)?);
    report.param("reps", reps);
    report.param("sampler", "dynamics");

    let rseed = derive_seed(seed, 0);
    let limit = runner.map(reps, |r| -> LabResult<_> {
        Ok(excursions_to_resolution(&p, h, replicate_seed(rseed, r))?.sum_sq())
    })?;
    for (r, v) in limit.iter().enumerate() {
        report.push_row(row!["excursions", r, *v]);
    }
    report.estimate("excursions/sum_sq", &sample_estimate(&limit)?);

    let mut distances = Vec::new();
    for &n in &sizes {
        let x = aldous_limic_sequence(kappa, &c, n, c.len(), SequenceMode::Brownian)?;
        let time = 1.0 / x.s2() + t;
        if time < 0.0 {
            return Err(config_err!("n = {n} gives negative coalescent time {time}"));
        }
        let nseed = derive_seed(seed, n as u64);
        let s2 = runner.map(reps, |r| -> LabResult<_> {
            Ok(Sampler::Dynamics
                .state(&x, time, replicate_seed(nseed, r))?
                .s2())
        })?;
        let label = format!("n{n}");
        for (r, v) in s2.iter().enumerate() {
            report.push_row(row![label.as_str(), r, *v]);
        }
        report.estimate(format!("{label}/S2"), &sample_estimate(&s2)?);
        let ks = ks_two_sample(&s2, &limit)?;
        report.metric(format!("{label}/ks_distance"), ks.statistic);
        report.metric(format!("{label}/ks_p_value"), ks.p_value);
        distances.push((n, ks.statistic));
    }
    for w in distances.windows(2) {
        let ((na, da), (nb, db)) = (w[0], w[1]);
        report.verdict(
            format!("decreasing/n{na}-n{nb}"),
            db < da,
            format!("KS distance {da} -> {db}"),
        );
    }
    Ok(report)
}

fn positive_params(cfg: &ExperimentConfig, t: f64, c: &[f64]) -> LabResult<ParamTriple> {
    let p = ParamTriple::new(cfg.kappa_or(1.0), cfg.t_or(t), cfg.c_or(c)?)?;
    if !(p.kappa > 0.0 && p.t > 0.0) {
        return Err(config_err!("this experiment needs kappa > 0 and t > 0"));
    }
    Ok(p)
}

/// OLS slope of `y` on `x`.
fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

pub fn sigma_tails(cfg: &ExperimentConfig, runner: &Runner) -> LabResult<Report> {
    const POINTS: usize = 50;
    const UPPER_QUANTILE: f64 = 0.995;
    let reps = cfg.reps_or(10_000)?;
    let seed = cfg.seed();
    let p = positive_params(cfg, 1.0, &[])?;
    let h = cfg.grid_step_or(p.t_prime() / 1e4)?;
    let horizon = cfg.horizon.unwrap_or(20.0);
    let mut report = Report::new(&["rep", "sigma", "censored"]);
    report.param("kappa", p.kappa);
    report.param("t", p.t);
    report.param("c", p.c.masses());
    report.param("grid_step", aligned_step(p.t_prime(), h));
    report.param("horizon", horizon);
    report.param("reps", reps);

    let sigmas = runner.map(reps, |r| -> LabResult<_> {
        Ok(sigma_sample(&p, horizon, h, replicate_seed(seed, r))?)
    })?;
    for (r, s) in sigmas.iter().enumerate() {
        match s {
            Sigma::Hit(v) => report.push_row(row![r, *v, false]),
            Sigma::Censored => report.push_row(row![r, horizon, true]),
        }
    }
    let censored = sigmas
        .iter()
        .filter(|s| matches!(s, Sigma::Censored))
        .count();
    // censored samples sit above every hit
    let mut sorted: Vec<f64> = sigmas
        .iter()
        .map(|s| s.value().unwrap_or(f64::INFINITY))
        .collect();
    sorted.sort_by(f64::total_cmp);
    let quantile = |q: f64| sorted[((q * reps as f64).ceil() as usize).clamp(1, reps) - 1];
    let (lo, hi) = (quantile(0.9), quantile(UPPER_QUANTILE));
    report.metric("censored_fraction", censored as f64 / reps as f64);
    report.metric("q90", lo);
    report.metric("q995", hi);
    if !(hi.is_finite() && hi > lo) {
        report.verdict(
            "tail-slope",
            false,
            format!("degenerate tail window [{lo}, {hi}]"),
        );
        return Ok(report);
    }
    let grid: Vec<f64> = (0..POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / (POINTS - 1) as f64)
        .collect();
    let log_survival: Vec<f64> = grid
        .iter()
        .map(|&s| {
            let above = sorted.len() - sorted.partition_point(|&v| v < s);
            (above as f64 / reps as f64).ln()
        })
        .collect();
    let fitted = slope(&grid, &log_survival);
    report.metric("tail_slope", fitted);
    report.metric("proof_rate", -(p.t / 4.0).min(p.t * p.t / (4.0 * p.kappa)));
    report.verdict(
        "tail-slope",
        fitted <= -0.1,
        format!("log-survival slope {fitted} on [{lo}, {hi}] (q90 to q99.5)"),
    );
    Ok(report)
}

pub fn shift_identity(cfg: &ExperimentConfig, runner: &Runner) -> LabResult<Report> {
    let seeds = cfg.reps_or(1000)?;
    let seed = cfg.seed();
    let p = positive_params(cfg, 1.0, &[0.8, 0.3])?;
    let h = cfg.grid_step_or(1e-3)?;
    let horizon = cfg.horizon.unwrap_or(10.0);
    let mut report = Report::new(&[
        "rep",
        "sigma",
        "censored",
        "compared",
        "max_deviation",
        "passed",
    ]);
    report.param("kappa", p.kappa);
    report.param("t", p.t);
    report.param("c", p.c.masses());
    report.param("grid_step", aligned_step(p.t_prime(), h));
    report.param("horizon", horizon);
    report.param("seeds", seeds);
    let checks = runner.map(seeds, |r| -> LabResult<_> {
        Ok(shift_identity_check(
            &p,
            horizon,
            h,
            replicate_seed(seed, r),
        )?)
    })?;
    let mut worst = 0.0f64;
    for (r, c) in checks.iter().enumerate() {
        worst = worst.max(c.max_deviation);
        let sigma = c.sigma.value();
        report.push_row(row![
            r,
            sigma.unwrap_or(horizon),
            sigma.is_none(),
            c.compared,
            c.max_deviation,
            c.passed
        ]);
    }
    let passed = checks.iter().filter(|c| c.passed).count();
    let censored = checks.iter().filter(|c| c.sigma.value().is_none()).count();
    report.metric("pass_rate", passed as f64 / seeds as f64);
    report.metric("max_deviation", worst);
    report.metric("censored_seeds", censored as f64);
    report.verdict(
        "identity",
        passed == seeds,
        format!("{passed} of {seeds} seeds pass, {censored} censored"),
    );
    Ok(report)
}

pub fn eta_thinning(cfg: &ExperimentConfig, runner: &Runner) -> LabResult<Report> {
    let reps = cfg.reps_or(10_000)?;
    let seed = cfg.seed();
    let p = positive_params(cfg, 0.5, &[1.5, 0.8])?;
    let s0 = cfg.horizon.unwrap_or(1.0);
    if !(s0 > 0.0) {
        return Err(config_err!(
            "the evaluation time (horizon) must be positive"
        ));
    }
    let t_prime = p.t_prime();
    let h = aligned_step(t_prime, cfg.grid_step_or(1e-3)?);
    let k0 = (t_prime / h).round() as usize;
    let k1 = (s0 / h + 1e-9).floor() as usize;
    let mut report = Report::new(&["rep", "thinned", "shifted_increment"]);
    report.param("kappa", p.kappa);
    report.param("t", p.t);
    report.param("c", p.c.masses());
    report.param("s0", k1 as f64 * h);
    report.param("grid_step", h);
    report.param("reps", reps);
    let pairs = runner.map(reps, |r| -> LabResult<_> {
        let s = replicate_seed(seed, r);
        let thinned = eta_thinned_W(&p, s0, h, derive_seed(s, 1), EtaMode::Sample)?;
        let w = sample_W(&p, (k0 + k1) as f64 * h, h, derive_seed(s, 2))?;
        Ok((thinned.values()[k1], w.values()[k0 + k1] - w.values()[k0]))
    })?;
    for (r, (a, b)) in pairs.iter().enumerate() {
        report.push_row(row![r, *a, *b]);
    }
    let a: Vec<f64> = pairs.iter().map(|v| v.0).collect();
    let b: Vec<f64> = pairs.iter().map(|v| v.1).collect();
    let s = k1 as f64 * h;
    let exact_mean = -p.t * s - 0.5 * p.kappa * s * s
        + p.c
            .iter()
            .map(|ci| (-ci * t_prime).exp() * ci * -(-ci * s).exp_m1() - ci * ci * s)
            .sum::<f64>();
    report.metric("exact_mean", exact_mean);
    report.estimate("thinned", &EstimateWithCI::from_samples(&a)?);
    report.estimate("shifted_increment", &EstimateWithCI::from_samples(&b)?);
    let ks = ks_two_sample(&a, &b)?;
    report.metric("ks_statistic", ks.statistic);
    report.metric("ks_p_value", ks.p_value);
    report.verdict(
        "ks",
        ks.p_value > P_MIN,
        format!("KS D = {}, p = {}", ks.statistic, ks.p_value),
    );
    Ok(report)
}

pub fn col_consistency(cfg: &ExperimentConfig, runner: &Runner) -> LabResult<Report> {
    let reps = cfg.reps_or(10_000)?;
    let seed = cfg.seed();
    let cstar = match cfg.cstar.as_deref() {
        None => 0.5,
        Some([c]) => *c,
        Some(other) => {
            return Err(config_err!(
                "cstar must hold exactly one rate, got {other:?}"
            ))
        }
    };
    let setup = ColSetup {
        kappa: cfg.kappa_or(1.0),
        u: cfg.t_or(-1.0),
        c: cfg.c_or(&[])?,
        cstar,
        h: cfg.grid_step_or(2.5e-4)?,
        horizon: cfg.horizon,
    };
    let mut report = Report::new(&[
        "rep",
        "collapsed_sum_sq",
        "direct_sum_sq",
        "collapsed_censored",
        "direct_censored",
    ]);
    report.param("kappa", setup.kappa);
    report.param("u", setup.u);
    report.param("c", setup.c.masses());
    report.param("cstar", cstar);
    report.param("grid_step", setup.h);
    let horizon = match setup.horizon {
        Some(h) => h,
        None => resolution_horizon(setup.kappa, setup.u, setup.h)?,
    };
    report.param("horizon", horizon);
    report.param("reps", reps);
    let pairs = runner.map(reps, |r| -> LabResult<_> {
        Ok(col_consistency_sample(&setup, replicate_seed(seed, r))?)
    })?;
    for (r, v) in pairs.iter().enumerate() {
        report.push_row(row![
            r,
            v.collapsed_sum_sq,
            v.direct_sum_sq,
            v.collapsed_censored,
            v.direct_censored
        ]);
    }
    let summary = ColConsistency::from_pairs(&pairs)?;
    report.estimate("collapsed", &summary.collapsed);
    report.estimate("direct", &summary.direct);
    report.metric("ks_statistic", summary.ks.statistic);
    report.metric("ks_p_value", summary.ks.p_value);
    report.metric("censored_fraction", summary.censored_fraction);
    report.verdict(
        "ks",
        summary.ks.p_value > P_MIN,
        format!(
            "KS D = {}, p = {}",
            summary.ks.statistic, summary.ks.p_value
        ),
    );
    let (ok, detail) = within_joint_radius(&summary.collapsed, &summary.direct);
    report.verdict("means", ok, detail);
    Ok(report)
}

pub fn v_decomposition(cfg: &ExperimentConfig, runner: &Runner) -> LabResult<Report> {
    const CHECKPOINTS: usize = 4;
    let reps = cfg.reps_or(10_000)?;
    let seed = cfg.seed();
    let c = cfg.c_or(&[1.5, 0.7, 0.3])?;
    let horizon = cfg.horizon.unwrap_or(2.0);
    let h = cfg.grid_step_or(1e-2)?;
    let mut report = Report::new(&["rep", "s", "v", "martingale", "compensator", "bracket"]);
    report.param("c", c.masses());
    report.param("horizon", horizon);
    report.param("grid_step", h);
    report.param("reps", reps);

    let runs = runner.map(reps, |r| -> LabResult<_> {
        let v = sample_V(&c, horizon, h, replicate_seed(seed, r))?;
        let d = decompose_V(&v, &c)?;
        let len = v.values().len();
        let mut identity_error = 0.0f64;
        let mut monotone = d.compensator[0] == 0.0 && d.bracket[0] == 0.0;
        for k in 0..len {
            identity_error =
                identity_error.max((v.values()[k] - (d.martingale[k] - d.compensator[k])).abs());
            if k > 0 {
                monotone &=
                    d.compensator[k] >= d.compensator[k - 1] && d.bracket[k] >= d.bracket[k - 1];
            }
        }
        let points: Vec<_> = (1..=CHECKPOINTS)
            .map(|i| {
                let k = (len - 1) * i / CHECKPOINTS;
                (
                    v.time(k),
                    v.values()[k],
                    d.martingale[k],
                    d.compensator[k],
                    d.bracket[k],
                )
            })
            .collect();
        Ok((points, identity_error, monotone))
    })?;
    for (r, (points, _, _)) in runs.iter().enumerate() {
        for &(s, v, m, a, b) in points {
            report.push_row(row![r, s, v, m, a, b]);
        }
    }
    let worst = runs.iter().map(|r| r.1).fold(0.0, f64::max);
    let monotone = runs.iter().all(|r| r.2);
    report.metric("max_identity_error", worst);
    report.verdict(
        "identity",
        worst <= 1e-9,
        format!("max |V - (M - A)| = {worst}"),
    );
    report.verdict(
        "monotone",
        monotone,
        "compensator and bracket start at 0 and never decrease",
    );
    for i in 0..CHECKPOINTS {
        let s = runs[0].0[i].0;
        let m: Vec<f64> = runs.iter().map(|r| r.0[i].2).collect();
        let excess: Vec<f64> = runs.iter().map(|r| r.0[i].2.powi(2) - r.0[i].4).collect();
        let em = sample_estimate(&m)?;
        let ex = sample_estimate(&excess)?;
        report.estimate(format!("s={s}/E_M"), &em);
        report.estimate(format!("s={s}/E_M2_minus_bracket"), &ex);
        report.verdict(
            format!("s={s}/mean-zero"),
            em.covers(0.0, 4.0),
            format!("E M = {} (SE {})", em.mean, em.std_error),
        );
        report.verdict(
            format!("s={s}/bracket"),
            ex.covers(0.0, 4.0),
            format!("E[M^2 - <M>] = {} (SE {})", ex.mean, ex.std_error),
        );
    }
    Ok(report)
}
