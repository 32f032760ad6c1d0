//! Random-graph experiments checked against exact enumeration.

use std::collections::HashMap;

use mclab_core::graphsim::{
    exact_connect_probs, exact_disjoint_connect_prob, exact_partition_law, sample_components,
    simulate_coalescent,
};
use mclab_core::moments::{bound_connect, bound_npoint, ConstantsTable};
use mclab_core::rng::{derive_seed, replicate_seed, stream};
use mclab_core::stats::{chi_squared_gof, chi_squared_two_sample};
use mclab_core::MassVector;
use rand::RngExt;

use super::random_instance;
use crate::config::{mass, ExperimentConfig};
use crate::error::{config_err, LabResult};
use crate::pvalue::chi_squared_p;
use crate::report::Report;
use crate::row;
use crate::runner::Runner;

const WINDOW: f64 = 0.9;
const EXACT_SLACK: f64 = 1e-12;
const P_MIN: f64 = 0.01;

fn sampler_instances(cfg: &ExperimentConfig) -> LabResult<Vec<(MassVector, f64)>> {
    match cfg.x_vector()? {
        Some(x) => Ok(vec![(x, cfg.t_or(0.5))]),
        None => Ok(vec![
            (mass(vec![1.0; 4])?, 0.5),
            (mass(vec![4.0, 3.0, 2.0, 1.0])?, 0.08),
        ]),
    }
}

/// Chi-squared cells: exact law order, plus one zero-probability cell for
/// any partition missing from it.
fn counts(keys: &[u64], index: &HashMap<u64, usize>, cells: usize) -> Vec<u64> {
    let mut out = vec![0u64; cells + 1];
    for k in keys {
        out[index.get(k).copied().unwrap_or(cells)] += 1;
    }
    out
}

pub fn sampler_agreement(cfg: &ExperimentConfig, runner: &Runner) -> LabResult<Report> {
    let reps = cfg.reps_or(200_000)?;
    let seed = cfg.seed();
    let instances = sampler_instances(cfg)?;
    let mut report = Report::new(&["instance", "sampler", "rep", "partition_key", "components"]);
    report.param("reps", reps);
    report.param(
        "instances",
        instances
            .iter()
            .map(|(x, t)| (x.masses().to_vec(), *t))
            .collect::<Vec<_>>(),
    );

    for (i, (x, t)) in instances.iter().enumerate() {
        let label = format!("x{i}");
        let law = exact_partition_law(x, *t)?;
        let index: HashMap<u64, usize> =
            law.iter().enumerate().map(|(c, (k, _))| (*k, c)).collect();
        let mut probs: Vec<f64> = law.iter().map(|(_, p)| *p).collect();
        probs.push(0.0);

        let graph_seed = derive_seed(seed, 2 * i as u64);
        let dyn_seed = derive_seed(seed, 2 * i as u64 + 1);
        let graph: Vec<(u64, usize)> = runner.map(reps, |r| -> LabResult<_> {
            let p = sample_components(x, *t, replicate_seed(graph_seed, r))?;
            Ok((
                p.key()
                    .ok_or_else(|| config_err!("too many blocks for partition keys"))?,
                p.num_components(),
            ))
        })?;
        let dynamics: Vec<(u64, usize)> = runner.map(reps, |r| -> LabResult<_> {
            let p = simulate_coalescent(x, *t, replicate_seed(dyn_seed, r))?.final_state;
            Ok((
                p.key()
                    .ok_or_else(|| config_err!("too many blocks for partition keys"))?,
                p.num_components(),
            ))
        })?;
        for (name, samples) in [("graph", &graph), ("dynamics", &dynamics)] {
            for (r, (key, comps)) in samples.iter().enumerate() {
                report.push_row(row![label.as_str(), name, r, *key, *comps]);
            }
        }

        let gk: Vec<u64> = graph.iter().map(|s| s.0).collect();
        let dk: Vec<u64> = dynamics.iter().map(|s| s.0).collect();
        let gc = counts(&gk, &index, law.len());
        let dc = counts(&dk, &index, law.len());
        for (name, c) in [("graph-vs-exact", &gc), ("dynamics-vs-exact", &dc)] {
            let (stat, dof) = chi_squared_gof(c, &probs, 5.0)?;
            let p = chi_squared_p(stat, dof);
            report.metric(format!("{label}/{name}/p_value"), p);
            report.verdict(
                format!("{label}/{name}"),
                p > P_MIN,
                format!("chi2 {stat} on {dof} dof, p = {p}"),
            );
        }
        let (stat, dof) = chi_squared_two_sample(&gc, &dc)?;
        let p = chi_squared_p(stat, dof);
        report.metric(format!("{label}/graph-vs-dynamics/p_value"), p);
        report.verdict(
            format!("{label}/graph-vs-dynamics"),
            p > P_MIN,
            format!("chi2 {stat} on {dof} dof, p = {p}"),
        );
    }
    Ok(report)
}

/// Instances for the exact scans: the configured `x` (with `t`) or
/// `instances` random ones.
fn scan_instances(
    cfg: &ExperimentConfig,
    min_blocks: usize,
    max_blocks: usize,
    tag: u64,
) -> LabResult<Vec<(MassVector, f64)>> {
    if let Some(x) = cfg.x_vector()? {
        let t = cfg.t.ok_or_else(|| config_err!("x given without t"))?;
        return Ok(vec![(x, t)]);
    }
    let mut rng = stream(cfg.seed(), tag);
    (0..cfg.instances_or(100)?)
        .map(|_| random_instance(&mut rng, min_blocks, max_blocks, WINDOW))
        .collect()
}

fn pairs_of(n: usize) -> Vec<[usize; 2]> {
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| [i, j]))
        .collect()
}

fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == size)
        .map(|m| (0..n).filter(|&i| m & (1 << i) != 0).collect())
        .collect()
}

fn fmt_targets(t: &[usize]) -> String {
    t.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

pub fn lemma21_scan(cfg: &ExperimentConfig, runner: &Runner) -> LabResult<Report> {
    let instances = scan_instances(cfg, 2, 6, 0x21)?;
    let mut report = Report::new(&[
        "instance", "blocks", "t", "t_norm2", "i", "j", "exact", "bound", "pass",
    ]);
    report.param("instances", instances.len());
    report.param("window", WINDOW);
    let results = runner.map(instances.len(), |k| -> LabResult<_> {
        let (x, t) = &instances[k as usize];
        let pairs = pairs_of(x.len());
        let exact = exact_connect_probs(x, *t, &pairs)?;
        let factor = bound_connect(x, *t)?;
        Ok(pairs
            .into_iter()
            .zip(exact)
            .map(|(p, e)| (p, e, x[p[0]] * x[p[1]] * factor))
            .collect::<Vec<_>>())
    })?;
    let (mut checked, mut failed, mut worst) = (0usize, 0usize, f64::INFINITY);
    for (k, ((x, t), rows)) in instances.iter().zip(&results).enumerate() {
        for &([i, j], exact, bound) in rows {
            let pass = exact <= bound + EXACT_SLACK;
            checked += 1;
            failed += usize::from(!pass);
            worst = worst.min(bound - exact);
            report.push_row(row![k, x.len(), *t, *t * x.s2(), i, j, exact, bound, pass]);
        }
    }
    report.metric("min_gap", worst);
    report.verdict(
        "pair-bound",
        failed == 0,
        format!("{failed} of {checked} pairs exceed the bound"),
    );
    Ok(report)
}

pub fn prop22_scan(cfg: &ExperimentConfig, runner: &Runner) -> LabResult<Report> {
    let instances = scan_instances(cfg, 2, 6, 0x22)?;
    let orders: Vec<usize> = match cfg.n {
        Some(n) if n >= 2 => vec![n as usize],
        Some(n) => return Err(config_err!("n must be at least 2, got {n}")),
        None => vec![2, 3, 4],
    };
    let table = ConstantsTable::new(orders.iter().copied().max().unwrap_or(4).max(4))?;
    let mut report = Report::new(&[
        "instance", "blocks", "t", "t_norm2", "n", "targets", "exact", "bound", "pass",
    ]);
    report.param("instances", instances.len());
    report.param("orders", &orders);
    let constants: Vec<String> = (2..=4)
        .map(|n| table.c(n).map(|c| c.to_string()).unwrap_or_default())
        .collect();
    report.param("C_2..C_4", &constants);
    report.verdict(
        "constants",
        constants == ["1", "6", "162"],
        format!("C_2..C_4 = {}", constants.join(", ")),
    );

    let results = runner.map(instances.len(), |k| -> LabResult<_> {
        let (x, t) = &instances[k as usize];
        let mut out = Vec::new();
        for &n in &orders {
            if n > x.len() {
                continue;
            }
            let sets = subsets(x.len(), n);
            let exact = exact_connect_probs(x, *t, &sets)?;
            for (s, e) in sets.into_iter().zip(exact) {
                let b = bound_npoint(x, *t, &s, &table)?;
                out.push((n, s, e, b));
            }
        }
        Ok(out)
    })?;
    let (mut checked, mut failed) = (0usize, 0usize);
    for (k, ((x, t), rows)) in instances.iter().zip(&results).enumerate() {
        for (n, s, exact, bound) in rows {
            let pass = *exact <= bound + EXACT_SLACK;
            checked += 1;
            failed += usize::from(!pass);
            report.push_row(row![
                k,
                x.len(),
                *t,
                *t * x.s2(),
                *n,
                fmt_targets(s),
                *exact,
                *bound,
                pass
            ]);
        }
    }
    report.verdict(
        "npoint-bound",
        failed == 0,
        format!("{failed} of {checked} target sets exceed the bound"),
    );
    Ok(report)
}

pub fn bk_verify(cfg: &ExperimentConfig, runner: &Runner) -> LabResult<Report> {
    let instances = scan_instances(cfg, 2, 5, 0x13)?;
    let mut rng = stream(cfg.seed(), 0x14);
    let pair_sets: Vec<Vec<(usize, usize)>> = instances
        .iter()
        .map(|(x, _)| {
            let count = rng.random_range(1..=2);
            (0..count)
                .map(|_| {
                    let a = rng.random_range(0..x.len());
                    let b = (a + rng.random_range(1..x.len())) % x.len();
                    (a.min(b), a.max(b))
                })
                .collect()
        })
        .collect();
    let mut report = Report::new(&[
        "instance", "blocks", "t", "pairs", "disjoint", "product", "pass",
    ]);
    report.param("instances", instances.len());
    let results = runner.map(instances.len(), |k| -> LabResult<_> {
        let (x, t) = &instances[k as usize];
        let pairs = &pair_sets[k as usize];
        let marginals = exact_connect_probs(
            x,
            *t,
            &pairs.iter().map(|&(a, b)| [a, b]).collect::<Vec<_>>(),
        )?;
        Ok((
            exact_disjoint_connect_prob(x, *t, pairs)?,
            marginals.iter().product::<f64>(),
        ))
    })?;
    let mut failed = 0;
    for (k, (((x, t), pairs), (disjoint, product))) in
        instances.iter().zip(&pair_sets).zip(&results).enumerate()
    {
        let pass = *disjoint <= product + EXACT_SLACK;
        failed += usize::from(!pass);
        let pairs = pairs
            .iter()
            .map(|(a, b)| format!("{a}-{b}"))
            .collect::<Vec<_>>()
            .join(" ");
        report.push_row(row![k, x.len(), *t, pairs, *disjoint, *product, pass]);
    }
    report.verdict(
        "bk",
        failed == 0,
        format!(
            "{failed} of {} instances violate the product bound",
            instances.len()
        ),
    );
    Ok(report)
}
