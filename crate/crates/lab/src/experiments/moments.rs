//! Moment estimates, generator identities and the grinding comparison.

use mclab_core::graphsim::{sample_components, sample_components_given_groups};
use mclab_core::moments::{
    bound_Sn, bound_joint, generator_closed_odd, generator_closed_product, generator_direct,
    martingale_path, BoundReport, ConstantsTable, Observable, Sampler,
};
use mclab_core::rng::{derive_seed, replicate_seed, stream};
use mclab_core::stats::{ks_one_sided_critical, ks_statistic_one_sided, EstimateWithCI};
use mclab_core::MassVector;
use rand::RngExt;

use super::{random_instance, sample_estimate, within_joint_radius};
use crate::config::{mass, ExperimentConfig};
use crate::error::{config_err, LabResult};
use crate::report::Report;
use crate::row;
use crate::runner::Runner;

const WINDOW: f64 = 0.9;

fn power_sums(masses: &[f64], max_k: u32) -> Vec<f64> {
    (1..=max_k)
        .map(|k| masses.iter().map(|m| m.powi(k as i32)).sum())
        .collect()
}

pub fn lemma31_scan(cfg: &ExperimentConfig, runner: &Runner) -> LabResult<Report> {
    let reps = cfg.reps_or(10_000)?;
    let seed = cfg.seed();
    let instances: Vec<(MassVector, f64)> = match cfg.x_vector()? {
        Some(x) => vec![(x, cfg.t.ok_or_else(|| config_err!("x given without t"))?)],
        None => {
            let mut rng = stream(seed, 0x31);
            (0..cfg.instances_or(20)?)
                .map(|_| random_instance(&mut rng, 2, 6, WINDOW))
                .collect::<LabResult<_>>()?
        }
    };
    let table = ConstantsTable::new(4)?;
    let mut report = Report::new(&["instance", "rep", "s2", "s3", "s4"]);
    report.param("reps", reps);
    report.param(
        "instances",
        instances
            .iter()
            .map(|(x, t)| (x.masses().to_vec(), *t))
            .collect::<Vec<_>>(),
    );
    for (i, (x, t)) in instances.iter().enumerate() {
        let iseed = derive_seed(seed, i as u64);
        let sums = runner.map(reps, |r| -> LabResult<_> {
            let p = sample_components(x, *t, replicate_seed(iseed, r))?;
            Ok(power_sums(p.component_masses(), 4))
        })?;
        for (r, s) in sums.iter().enumerate() {
            report.push_row(row![i, r, s[1], s[2], s[3]]);
        }
        for n in 2..=4u32 {
            let samples: Vec<f64> = sums.iter().map(|s| s[n as usize - 1]).collect();
            let est = sample_estimate(&samples)?;
            let b = BoundReport::evaluate(bound_Sn(x, *t, n, &table)?, est);
            report.estimate(format!("x{i}/E_S{n}"), &est);
            report.bound(format!("x{i}/S{n}"), &b);
        }
    }
    Ok(report)
}

pub fn joint_moments(cfg: &ExperimentConfig, runner: &Runner) -> LabResult<Report> {
    let reps = cfg.reps_or(10_000)?;
    let seed = cfg.seed();
    let t = cfg.t_or(0.45);
    let (n, m) = (cfg.n.unwrap_or(2), cfg.m.unwrap_or(3));
    if n < 2 || m < 1 {
        return Err(config_err!(
            "joint moments need n >= 2 and m >= 1, got ({n}, {m})"
        ));
    }
    let sizes = cfg.sizes.clone().unwrap_or_else(|| vec![8, 16, 32]);
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(config_err!(
            "sizes must be a non-empty list of positive lengths"
        ));
    }
    let table = ConstantsTable::new(n.max(2) as usize)?;
    let mut report = Report::new(&["length", "rep", "sn", "sm", "product"]);
    report.param("t", t);
    report.param("n", n);
    report.param("m", m);
    report.param("sizes", &sizes);
    report.param("reps", reps);
    report.param("masses", "x_i = i^-2, i = 1..length");

    let mut estimates = Vec::new();
    for &len in &sizes {
        let x = mass((1..=len).map(|i| (i as f64).powi(-2)).collect())?;
        let lseed = derive_seed(seed, len as u64);
        let pairs = runner.map(reps, |r| -> LabResult<_> {
            let p = sample_components(&x, t, replicate_seed(lseed, r))?;
            let s = power_sums(p.component_masses(), n.max(m));
            Ok((s[n as usize - 1], s[m as usize - 1]))
        })?;
        for (r, (a, b)) in pairs.iter().enumerate() {
            report.push_row(row![len, r, *a, *b, a * b]);
        }
        let products: Vec<f64> = pairs.iter().map(|(a, b)| a * b).collect();
        let est = sample_estimate(&products)?;
        report.estimate(format!("L{len}/E_S{n}S{m}"), &est);
        report.bound(
            format!("L{len}/joint-bound"),
            &BoundReport::evaluate(bound_joint(&x, t, n, m, &table)?, est),
        );
        estimates.push((len, est));
    }
    for w in estimates.windows(2) {
        let ((la, a), (lb, b)) = (&w[0], &w[1]);
        let (ok, detail) = within_joint_radius(a, b);
        report.verdict(format!("stable/L{la}-L{lb}"), ok, detail);
    }
    Ok(report)
}

/// `|a − b| / max(|a|, |b|)`; for a single block, whose pair sum is empty,
/// the closed form is measured against `x₁^degree`.
fn relative_error(direct: f64, closed: f64, x: &[f64], degree: i32) -> f64 {
    let scale = if x.len() == 1 {
        x[0].powi(degree)
    } else {
        direct.abs().max(closed.abs())
    };
    if scale == 0.0 {
        (direct - closed).abs()
    } else {
        (direct - closed).abs() / scale
    }
}

pub fn generator_oracle(cfg: &ExperimentConfig, runner: &Runner) -> LabResult<Report> {
    const TOL: f64 = 1e-10;
    let count = cfg.instances_or(1000)?;
    let max_len = cfg.n.map(|n| n as usize).unwrap_or(10);
    if max_len == 0 {
        return Err(config_err!("vector length bound must be positive"));
    }
    let mut rng = stream(cfg.seed(), 0x71);
    let vectors: Vec<Vec<f64>> = (0..count)
        .map(|_| {
            let len = rng.random_range(1..=max_len);
            (0..len).map(|_| 1.0 - rng.random::<f64>()).collect()
        })
        .collect();
    let mut report = Report::new(&[
        "vector",
        "length",
        "formula",
        "direct",
        "closed",
        "rel_error",
    ]);
    report.param("vectors", count);
    report.param("max_length", max_len);
    report.param("tolerance", TOL);

    let results = runner.map(count, |i| -> LabResult<_> {
        let x = &vectors[i as usize];
        let mut out = Vec::new();
        for k in 1..=3u32 {
            let d = generator_direct(x, Observable::PowerSum(2 * k + 1))?;
            let c = generator_closed_odd(x, k)?;
            out.push((
                format!("odd k={k}"),
                d,
                c,
                relative_error(d, c, x, 2 * k as i32 + 3),
            ));
        }
        for n in 1..=2u32 {
            for m in 2..=4u32 {
                let d = generator_direct(x, Observable::PowerSumProduct { n, m })?;
                let c = generator_closed_product(x, n, m)?;
                out.push((
                    format!("product n={n} m={m}"),
                    d,
                    c,
                    relative_error(d, c, x, (2 * n + m + 2) as i32),
                ));
            }
        }
        Ok(out)
    })?;
    let (mut worst_odd, mut worst_product) = (0.0f64, 0.0f64);
    for (i, rows) in results.iter().enumerate() {
        for (formula, d, c, e) in rows {
            if formula.starts_with("odd") {
                worst_odd = worst_odd.max(*e);
            } else {
                worst_product = worst_product.max(*e);
            }
            report.push_row(row![i, vectors[i].len(), formula.as_str(), *d, *c, *e]);
        }
    }
    report.metric("max_rel_error/odd", worst_odd);
    report.metric("max_rel_error/product", worst_product);
    report.verdict(
        "odd-closed-form",
        worst_odd <= TOL,
        format!("max relative error {worst_odd}"),
    );
    report.verdict(
        "product-closed-form",
        worst_product <= TOL,
        format!("max relative error {worst_product}"),
    );
    Ok(report)
}

fn observable(name: &str) -> LabResult<Observable> {
    match name {
        "s2" => Ok(Observable::PowerSum(2)),
        "s3" => Ok(Observable::PowerSum(3)),
        _ => Err(config_err!("unknown observable {name}")),
    }
}

pub fn martingale_residual(cfg: &ExperimentConfig, runner: &Runner) -> LabResult<Report> {
    let reps = cfg.reps_or(100_000)?;
    let seed = cfg.seed();
    let t = cfg.t_or(0.2);
    let grid = cfg.grid_points.unwrap_or(64);
    if grid < 2 {
        return Err(config_err!("grid_points must be at least 2"));
    }
    let starts: Vec<MassVector> = match cfg.x_vector()? {
        Some(x) => vec![x],
        None => vec![mass(vec![1.0; 2])?, mass(vec![1.0; 3])?],
    };
    let observables: Vec<&str> = match cfg.k {
        Some(2) => vec!["s2"],
        Some(3) => vec!["s3"],
        Some(k) => {
            return Err(config_err!(
                "k selects the observable s_k and must be 2 or 3, got {k}"
            ))
        }
        None => vec!["s2", "s3"],
    };
    let mut report = Report::new(&["case", "rep", "residual", "terminal"]);
    report.param("t", t);
    report.param("reps", reps);
    report.param("grid_points", grid);
    report.param(
        "starts",
        starts
            .iter()
            .map(|x| x.masses().to_vec())
            .collect::<Vec<_>>(),
    );
    report.param("observables", &observables);

    let mut case = 0u64;
    for x in &starts {
        for &g in &observables {
            let label = format!("x{}/{g}", x.len());
            let obs = observable(g)?;
            let cseed = derive_seed(seed, case);
            case += 1;
            let paths = runner.map(reps, |r| -> LabResult<_> {
                Ok(martingale_path(x, t, obs, grid, replicate_seed(cseed, r))?)
            })?;
            for (r, (res, term)) in paths.iter().enumerate() {
                report.push_row(row![label.as_str(), r, *res, *term]);
            }
            let residual = sample_estimate(&paths.iter().map(|p| p.0).collect::<Vec<_>>())?;
            let terminal = sample_estimate(&paths.iter().map(|p| p.1).collect::<Vec<_>>())?;
            report.estimate(format!("{label}/residual"), &residual);
            report.estimate(format!("{label}/terminal"), &terminal);
            report.verdict(
                format!("{label}/residual"),
                residual.covers(0.0, 4.0),
                format!("residual {} with SE {}", residual.mean, residual.std_error),
            );
            if g == "s2" && x.masses() == [1.0, 1.0] {
                let exact = 2.0 + 2.0 * (1.0 - (-t).exp());
                report.verdict(
                    format!("{label}/closed-form"),
                    terminal.covers(exact, 4.0),
                    format!(
                        "E S2(t) estimate {} (SE {}) vs {exact}",
                        terminal.mean, terminal.std_error
                    ),
                );
            }
        }
    }
    Ok(report)
}

pub fn theorem11_moments(cfg: &ExperimentConfig, runner: &Runner) -> LabResult<Report> {
    let reps = cfg.reps_or(10_000)?;
    let seed = cfg.seed();
    let t = cfg.t_or(0.5);
    let sizes = cfg.sizes.clone().unwrap_or_else(|| vec![64, 128, 256, 512]);
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(config_err!(
            "sizes must be a non-empty list of positive block counts"
        ));
    }
    let orders: Vec<u32> = match cfg.n {
        Some(n) if n >= 1 => vec![n],
        Some(_) => return Err(config_err!("n must be positive")),
        None => vec![2, 4, 6],
    };
    let mut report = Report::new(&["blocks", "rep", "s2"]);
    report.param("t", t);
    report.param("sizes", &sizes);
    report.param("orders", &orders);
    report.param("reps", reps);
    report.param("sampler", "dynamics");

    let mut by_size = Vec::new();
    for &n_blocks in &sizes {
        let x = MassVector::uniform(n_blocks, (n_blocks as f64).powf(-0.5))?;
        let nseed = derive_seed(seed, n_blocks as u64);
        let s2 = runner.map(reps, |r| -> LabResult<_> {
            Ok(Sampler::Dynamics
                .state(&x, t, replicate_seed(nseed, r))?
                .s2())
        })?;
        for (r, v) in s2.iter().enumerate() {
            report.push_row(row![n_blocks, r, *v]);
        }
        let mut ests = Vec::new();
        for &n in &orders {
            let samples: Vec<f64> = s2.iter().map(|v| v.powf(n as f64 / 2.0)).collect();
            let est = sample_estimate(&samples)?;
            report.estimate(format!("N{n_blocks}/E_norm^{n}"), &est);
            ests.push(est);
        }
        by_size.push((n_blocks, ests));
    }
    for w in by_size.windows(2) {
        let ((na, a), (nb, b)) = (&w[0], &w[1]);
        for (k, &n) in orders.iter().enumerate() {
            let (ok, detail) = within_joint_radius(&a[k], &b[k]);
            report.verdict(format!("stable/n{n}/N{na}-N{nb}"), ok, detail);
        }
    }
    Ok(report)
}

pub fn grind_domination(cfg: &ExperimentConfig, runner: &Runner) -> LabResult<Report> {
    const ALPHA: f64 = 0.01;
    let reps = cfg.reps_or(10_000)?;
    let seed = cfg.seed();
    let x = cfg.x_vector()?.unwrap_or(mass(vec![1.5, 0.5, 0.5, 0.5])?);
    let t = cfg.t_or(0.35);
    let m = cfg.m.map(|m| m as usize).unwrap_or(1);
    let pieces = cfg.pieces.unwrap_or(4);
    if m < 1 || m > x.len() || pieces < 1 {
        return Err(config_err!("need 1 <= m <= {} and pieces >= 1", x.len()));
    }
    if !(t > 0.0) {
        return Err(config_err!("t must be positive, got {t}"));
    }
    // ground vector in construction order: crumbs of block i at
    // positions i*pieces..(i+1)*pieces, then the untouched blocks
    let mut ground = Vec::new();
    for &xi in &x[..m] {
        ground.extend(std::iter::repeat_n(xi / pieces as f64, pieces));
    }
    ground.extend_from_slice(&x[m..]);
    let groups: Vec<Vec<usize>> = (0..m)
        .map(|i| (i * pieces..(i + 1) * pieces).collect())
        .collect();
    let ground_norm2: f64 = ground.iter().map(|v| v * v).sum();
    if !(t * ground_norm2 < 0.5) {
        return Err(config_err!(
            "t |x^g|^2 = {} must be below 1/2; grind more finely",
            t * ground_norm2
        ));
    }
    let ground_sorted = mass(ground.clone())?;

    let mut report = Report::new(&["rep", "conditioned_norm", "ground_norm", "original_norm"]);
    report.param("x", x.masses());
    report.param("t", t);
    report.param("m", m);
    report.param("pieces", pieces);
    report.param("t_ground_norm2", t * ground_norm2);
    report.param("reps", reps);

    let samples = runner.map(reps, |r| -> LabResult<_> {
        let s = replicate_seed(seed, r);
        let first =
            sample_components_given_groups(&ground, t, &groups, 10_000_000, derive_seed(s, 1))?;
        let conditioned = sample_components(first.component_masses(), t, derive_seed(s, 2))?
            .component_masses()
            .norm();
        let unconditioned = sample_components(&ground_sorted, 2.0 * t, derive_seed(s, 3))?
            .component_masses()
            .norm();
        let original = sample_components(&x, t, derive_seed(s, 4))?
            .component_masses()
            .norm();
        Ok((conditioned, unconditioned, original))
    })?;
    for (r, (a, b, c)) in samples.iter().enumerate() {
        report.push_row(row![r, *a, *b, *c]);
    }
    let cond: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let uncond: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let orig: Vec<f64> = samples.iter().map(|s| s.2).collect();
    for (name, v) in [
        ("conditioned", &cond),
        ("ground", &uncond),
        ("original", &orig),
    ] {
        report.estimate(format!("E_norm/{name}"), &EstimateWithCI::from_samples(v)?);
    }
    let critical = ks_one_sided_critical(reps, reps, ALPHA);
    // dominance from above means F_dominating ≤ F_original everywhere
    let d_cond = ks_statistic_one_sided(&cond, &orig)?;
    let d_uncond = ks_statistic_one_sided(&uncond, &orig)?;
    report.metric("ks_plus/conditioned", d_cond);
    report.metric("ks_plus/ground", d_uncond);
    report.metric("ks_plus/critical", critical);
    report.verdict(
        "dominance",
        d_cond <= critical,
        format!(
            "sup(F_conditioned - F_original) = {d_cond} vs critical {critical} at alpha {ALPHA}"
        ),
    );
    Ok(report)
}
