//! Samplers for the coalescent state at a fixed time.
//!
//! Two routes produce the same law: the graphical construction, where each
//! pair `{i, j}` is joined by an open edge independently with probability
//! `1 - exp(-x_i x_j t)`, and the Markov dynamics, where the pair of live
//! blocks `(i, j)` merges at rate `y_i y_j`. Exact brute-force oracles over all
//! edge configurations of small vertex sets live in [`exact`].

mod dsu;
pub mod exact;
mod fenwick;

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use rand::RngExt;
use rand_distr::Exp1;

use crate::error::{invalid, Result};
use crate::mass::MassVector;
use crate::rng::{self, SimRng, STREAM_CLOCKS, STREAM_EDGES};
use crate::stats::{EstimateWithCI, Welford};

pub(crate) use dsu::Dsu;
use fenwick::Fenwick;

pub use exact::{
    exact_connect_prob, exact_connect_probs, exact_disjoint_connect_prob, exact_partition_law,
    ENUMERATION_CAP,
};

/// Partition of the block indices `0..n` into connected components.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentPartition {
    assignment: Vec<usize>,
    component_sums: Vec<f64>,
    component_masses: MassVector,
}

impl ComponentPartition {
    /// Builds the partition from per-block labels; labels are renumbered by
    /// first appearance so equal partitions compare equal.
    pub fn from_labels(x: &[f64], labels: &[usize]) -> Result<Self> {
        if x.len() != labels.len() {
            return Err(invalid!("{} labels for {} blocks", labels.len(), x.len()));
        }
        let mut remap: Vec<(usize, usize)> = Vec::new();
        let mut assignment = Vec::with_capacity(labels.len());
        let mut component_sums: Vec<f64> = Vec::new();
        for (&l, &m) in labels.iter().zip(x) {
            let id = match remap.iter().find(|(from, _)| *from == l) {
                Some(&(_, to)) => to,
                None => {
                    remap.push((l, component_sums.len()));
                    component_sums.push(0.0);
                    component_sums.len() - 1
                }
            };
            component_sums[id] += m;
            assignment.push(id);
        }
        let component_masses = MassVector::ord(component_sums.clone())?;
        Ok(ComponentPartition {
            assignment,
            component_sums,
            component_masses,
        })
    }

    fn from_dsu(x: &[f64], dsu: &mut Dsu) -> Self {
        let assignment = dsu.labels();
        let count = assignment.iter().max().map_or(0, |m| m + 1);
        let mut component_sums = alloc::vec![0.0; count];
        for (&id, &m) in assignment.iter().zip(x) {
            component_sums[id] += m;
        }
        let component_masses =
            MassVector::ord(component_sums.clone()).expect("sums of valid masses are valid");
        ComponentPartition {
            assignment,
            component_sums,
            component_masses,
        }
    }

    /// Component id of each block, numbered by smallest member.
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn component_of(&self, block: usize) -> usize {
        self.assignment[block]
    }

    pub fn same_component(&self, a: usize, b: usize) -> bool {
        self.assignment[a] == self.assignment[b]
    }

    /// Whether every index in `targets` lies in one component.
    pub fn all_connected(&self, targets: &[usize]) -> bool {
        match targets.split_first() {
            None => true,
            Some((&first, rest)) => rest.iter().all(|&b| self.same_component(first, b)),
        }
    }

    pub fn num_components(&self) -> usize {
        self.component_sums.len()
    }

    /// Mass of component `id`.
    pub fn component_mass(&self, id: usize) -> f64 {
        self.component_sums[id]
    }

    /// Ordered component masses (the coalescent state).
    pub fn component_masses(&self) -> &MassVector {
        &self.component_masses
    }

    /// Packs the canonical assignment into a `u64` (4 bits per block); `None`
    /// for more than 16 blocks.
    pub fn key(&self) -> Option<u64> {
        partition_key(&self.assignment)
    }
}

/// Key of a canonical (first-appearance) labelling, as used by
/// [`ComponentPartition::key`].
pub fn partition_key(labels: &[usize]) -> Option<u64> {
    if labels.len() > 16 {
        return None;
    }
    Some(
        labels
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &l)| acc | ((l as u64) << (4 * i))),
    )
}

fn check_time(t: f64, what: &str) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(invalid!("{what} must be >= 0, got {t}"));
    }
    Ok(())
}

/// Connected components of the random graph at time `t`.
///
/// Pairs are processed row-major over `i < j`; a pair already connected by
/// earlier open edges is skipped without consuming randomness.
pub fn sample_components(x: &MassVector, t: f64, seed: u64) -> Result<ComponentPartition> {
    check_time(t, "t")?;
    let mut rng = rng::stream(seed, STREAM_EDGES);
    Ok(percolate(x, t, &mut rng, true))
}

pub(crate) fn percolate(
    x: &[f64],
    t: f64,
    rng: &mut SimRng,
    skip_connected: bool,
) -> ComponentPartition {
    let n = x.len();
    let mut dsu = Dsu::new(n);
    for i in 0..n {
        let rate_i = x[i] * t;
        if rate_i == 0.0 {
            continue;
        }
        for (j, &xj) in x.iter().enumerate().skip(i + 1) {
            let p = -(-rate_i * xj).exp_m1();
            if p <= 0.0 || (skip_connected && dsu.same(i, j)) {
                continue;
            }
            if rng.random::<f64>() < p {
                dsu.union(i, j);
            }
        }
    }
    ComponentPartition::from_dsu(x, &mut dsu)
}

/// Random graph at time `t` conditioned on every group in `groups` being
/// connected through edges with both ends in the group.
///
/// The event only involves intra-group edges, so those are redrawn per group
/// until the group is connected (at most `max_attempts` rounds) and every
/// other pair is sampled unconditionally. `x` need not be sorted.
pub fn sample_components_given_groups(
    x: &[f64],
    t: f64,
    groups: &[Vec<usize>],
    max_attempts: u64,
    seed: u64,
) -> Result<ComponentPartition> {
    check_time(t, "t")?;
    let n = x.len();
    let mut group_of = alloc::vec![usize::MAX; n];
    for (g, members) in groups.iter().enumerate() {
        for &i in members {
            if i >= n || group_of[i] != usize::MAX {
                return Err(invalid!("group member {i} is out of range or repeated"));
            }
            group_of[i] = g;
        }
    }
    let mut rng = rng::stream(seed, STREAM_EDGES);
    let mut dsu = Dsu::new(n);
    for members in groups {
        let mut attempts = 0;
        let edges = loop {
            attempts += 1;
            if attempts > max_attempts {
                return Err(invalid!(
                    "group {members:?} stayed disconnected after {max_attempts} draws"
                ));
            }
            let mut local = Dsu::new(members.len());
            let mut open = Vec::new();
            for a in 0..members.len() {
                for b in a + 1..members.len() {
                    let p = -(-x[members[a]] * x[members[b]] * t).exp_m1();
                    if rng.random::<f64>() < p {
                        local.union(a, b);
                        open.push((members[a], members[b]));
                    }
                }
            }
            if (1..members.len()).all(|a| local.same(0, a)) {
                break open;
            }
        };
        for (a, b) in edges {
            dsu.union(a, b);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if group_of[i] != usize::MAX && group_of[i] == group_of[j] {
                continue;
            }
            let p = -(-x[i] * x[j] * t).exp_m1();
            if p <= 0.0 || dsu.same(i, j) {
                continue;
            }
            if rng.random::<f64>() < p {
                dsu.union(i, j);
            }
        }
    }
    Ok(ComponentPartition::from_dsu(x, &mut dsu))
}

/// One merge: block `absorbed` joins block `kept` at `time`. Block ids are the
/// smallest original index in the block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergeEvent {
    pub time: f64,
    pub kept: usize,
    pub absorbed: usize,
}

/// Invariant: event times strictly increase and every event merges two live blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct MergeTrajectory {
    pub initial: MassVector,
    pub events: Vec<MergeEvent>,
    pub final_state: ComponentPartition,
}

impl MergeTrajectory {
    /// Masses of the live blocks (indexed by block id, zero for absorbed ids)
    /// at each of the sorted `times`.
    pub fn masses_at(&self, times: &[f64]) -> Vec<Vec<f64>> {
        let mut masses = self.initial.masses().to_vec();
        let mut next = 0;
        let mut out = Vec::with_capacity(times.len());
        for &time in times {
            while next < self.events.len() && self.events[next].time <= time {
                let e = self.events[next];
                masses[e.kept] += masses[e.absorbed];
                masses[e.absorbed] = 0.0;
                next += 1;
            }
            out.push(masses.clone());
        }
        out
    }
}

/// Continuous-time multiplicative coalescent from `x`, run until `horizon`
/// (which may be infinite) or until a single block of positive mass remains.
///
/// The merging pair is drawn by picking `i` with weight `y_i (s_1 - y_i)` and
/// then `j != i` with weight `y_j`, which gives pair weight `y_i y_j` without
/// a quadratic pair table.
pub fn simulate_coalescent(x: &MassVector, horizon: f64, seed: u64) -> Result<MergeTrajectory> {
    check_time(horizon, "horizon")?;
    let mut rng = rng::stream(seed, STREAM_CLOCKS);
    let n = x.len();
    let s1 = x.s1();
    let mut y = x.masses().to_vec();
    let mut mass_tree = Fenwick::new(&y);
    let first_weights: Vec<f64> = y.iter().map(|&m| m * (s1 - m)).collect();
    let mut first_tree = Fenwick::new(&first_weights);
    let mut live = y.iter().filter(|&&m| m > 0.0).count();
    let mut dsu = Dsu::new(n);
    let mut events = Vec::new();
    let mut time = 0.0f64;

    while live > 1 {
        let rate = first_tree.total() / 2.0;
        if !(rate > 0.0) {
            break;
        }
        let dt: f64 = rng.sample::<f64, _>(Exp1) / rate;
        if time + dt > horizon {
            break;
        }
        time += dt;
        let i = first_tree
            .find(rng.random::<f64>() * first_tree.total())
            .expect("positive total implies a positive slot");
        mass_tree.set(i, 0.0);
        let j = mass_tree
            .find(rng.random::<f64>() * mass_tree.total())
            .expect("at least two live blocks");
        let (kept, absorbed) = if i < j { (i, j) } else { (j, i) };
        y[kept] += y[absorbed];
        y[absorbed] = 0.0;
        mass_tree.set(kept, y[kept]);
        mass_tree.set(absorbed, 0.0);
        first_tree.set(kept, y[kept] * (s1 - y[kept]));
        first_tree.set(absorbed, 0.0);
        dsu.union(kept, absorbed);
        live -= 1;
        events.push(MergeEvent {
            time,
            kept,
            absorbed,
        });
    }

    Ok(MergeTrajectory {
        initial: x.clone(),
        events,
        final_state: ComponentPartition::from_dsu(x.masses(), &mut dsu),
    })
}

/// Monte Carlo estimate of `P(all targets connected)` over `reps` independent
/// graphs; replicate `r` uses seed `replicate_seed(seed, r)`.
pub fn mc_connect_prob(
    x: &MassVector,
    t: f64,
    targets: &[usize],
    reps: usize,
    seed: u64,
) -> Result<EstimateWithCI> {
    if reps < 1 {
        return Err(invalid!("reps must be >= 1"));
    }
    check_targets(x.len(), targets)?;
    let mut acc = Welford::default();
    for r in 0..reps {
        let part = sample_components(x, t, rng::replicate_seed(seed, r as u64))?;
        acc.push(if part.all_connected(targets) {
            1.0
        } else {
            0.0
        });
    }
    acc.finish()
}

pub(crate) fn check_targets(n: usize, targets: &[usize]) -> Result<()> {
    if targets.is_empty() {
        return Err(invalid!("target set must be non-empty"));
    }
    if let Some(&bad) = targets.iter().find(|&&i| i >= n) {
        return Err(invalid!("target index {bad} out of range for {n} blocks"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeMap;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    fn mv(v: &[f64]) -> MassVector {
        MassVector::ord(v.to_vec()).unwrap()
    }

    fn p_value(stat: f64, dof: usize) -> f64 {
        1.0 - ChiSquared::new(dof as f64).unwrap().cdf(stat)
    }

    #[test]
    fn conditioned_groups_match_exact_conditional_law() {
        // P(partition | {0,1,2} connected among themselves) by enumeration
        let x = [0.9, 0.8, 0.7, 0.6];
        let t = 0.9;
        let n = 4;
        let ends: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        let mut cond: BTreeMap<u64, f64> = BTreeMap::new();
        for mask in 0u32..(1 << ends.len()) {
            let mut w = 1.0;
            let mut all = Dsu::new(n);
            let mut inner = Dsu::new(n);
            for (k, &(i, j)) in ends.iter().enumerate() {
                let p = 1.0 - (-x[i] * x[j] * t).exp();
                if mask & (1 << k) != 0 {
                    w *= p;
                    all.union(i, j);
                    if j < 3 {
                        inner.union(i, j);
                    }
                } else {
                    w *= 1.0 - p;
                }
            }
            if inner.same(0, 1) && inner.same(0, 2) {
                *cond
                    .entry(partition_key(&all.labels()).unwrap())
                    .or_insert(0.0) += w;
            }
        }
        let total: f64 = cond.values().sum();
        let reps = 50_000;
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        for r in 0..reps {
            let p = sample_components_given_groups(&x, t, &[alloc::vec![0, 1, 2]], 1_000_000, r)
                .unwrap();
            assert!(p.same_component(0, 1) && p.same_component(1, 2));
            *counts.entry(p.key().unwrap()).or_insert(0) += 1;
        }
        let keys: Vec<u64> = cond.keys().copied().collect();
        let observed: Vec<u64> = keys
            .iter()
            .map(|k| counts.get(k).copied().unwrap_or(0))
            .collect();
        assert_eq!(observed.iter().sum::<u64>(), reps);
        let probs: Vec<f64> = keys.iter().map(|k| cond[k] / total).collect();
        let (stat, dof) = crate::stats::chi_squared_gof(&observed, &probs, 5.0).unwrap();
        assert!(p_value(stat, dof) > 0.001, "stat {stat} dof {dof}");
    }

    #[test]
    fn no_edges_at_time_zero() {
        let part = sample_components(&mv(&[1.0, 1.0]), 0.0, 3).unwrap();
        assert_eq!(part.num_components(), 2);
        assert_eq!(part.component_masses().masses(), &[1.0, 1.0]);
        assert!(sample_components(&mv(&[1.0]), -1.0, 0).is_err());
    }

    #[test]
    fn sampler_is_deterministic_given_seed() {
        let x = mv(&[0.9, 0.8, 0.5, 0.5, 0.3, 0.1]);
        let a = sample_components(&x, 2.0, 99).unwrap();
        let b = sample_components(&x, 2.0, 99).unwrap();
        assert_eq!(a, b);
        let ta = simulate_coalescent(&x, 2.0, 99).unwrap();
        let tb = simulate_coalescent(&x, 2.0, 99).unwrap();
        assert_eq!(ta, tb);
    }

    #[test]
    fn two_block_merge_frequency() {
        let (a, b, t) = (0.7, 1.3, 0.8);
        let x = mv(&[a, b]);
        let est = mc_connect_prob(&x, t, &[0, 1], 40_000, 5).unwrap();
        let exact = 1.0 - (-a * b * t).exp();
        assert!(est.covers(exact, 4.0), "{est:?} vs {exact}");
    }

    #[test]
    fn three_unit_blocks_all_connected_frequency() {
        let t = 0.6;
        let p = 1.0 - (-t).exp();
        let expect = 3.0 * p * p - 2.0 * p * p * p;
        let est = mc_connect_prob(&mv(&[1.0; 3]), t, &[0, 1, 2], 40_000, 11).unwrap();
        assert!(est.covers(expect, 4.0), "{est:?} vs {expect}");
    }

    #[test]
    fn mc_connect_trivial_cases() {
        let x = mv(&[1.0, 1.0, 1.0]);
        assert_eq!(mc_connect_prob(&x, 0.0, &[0, 2], 100, 1).unwrap().mean, 0.0);
        let single = mc_connect_prob(&x, 3.0, &[1], 100, 1).unwrap();
        assert_eq!((single.mean, single.std_error), (1.0, 0.0));
        assert!(mc_connect_prob(&x, 1.0, &[0], 0, 1).is_err());
        assert!(mc_connect_prob(&x, 1.0, &[5], 10, 1).is_err());
    }

    #[test]
    fn coalescent_single_block_is_inert() {
        let tr = simulate_coalescent(&mv(&[1.0]), f64::INFINITY, 0).unwrap();
        assert!(tr.events.is_empty());
        assert_eq!(tr.final_state.component_masses().masses(), &[1.0]);
        assert!(simulate_coalescent(&mv(&[1.0]), -0.1, 0).is_err());
    }

    #[test]
    fn coalescent_runs_to_one_block() {
        let x = mv(&[1.0, 1.0, 1.0]);
        for seed in 0..50 {
            let tr = simulate_coalescent(&x, f64::INFINITY, seed).unwrap();
            assert_eq!(tr.events.len(), 2);
            assert!(tr.events[0].time < tr.events[1].time);
            assert_eq!(tr.final_state.num_components(), 1);
        }
    }

    #[test]
    fn first_merge_time_is_exponential_with_total_rate() {
        // total rate (s1^2 - s2)/2 = 3 for three unit blocks
        let x = mv(&[1.0, 1.0, 1.0]);
        let times: Vec<f64> = (0..20_000)
            .map(|r| simulate_coalescent(&x, f64::INFINITY, r).unwrap().events[0].time)
            .collect();
        let est = EstimateWithCI::from_samples(&times).unwrap();
        assert!(est.covers(1.0 / 3.0, 4.0), "{est:?}");
        // P(T > 0.5) = e^{-1.5}
        let frac = times.iter().filter(|&&s| s > 0.5).count() as f64 / times.len() as f64;
        let p = (-1.5f64).exp();
        assert!((frac - p).abs() < 4.0 * (p * (1.0 - p) / times.len() as f64).sqrt());
    }

    #[test]
    fn two_block_merge_time_is_exp_ab() {
        let (a, b) = (0.5, 2.5);
        let times: Vec<f64> = (0..20_000)
            .map(|r| {
                simulate_coalescent(&mv(&[a, b]), f64::INFINITY, 1000 + r)
                    .unwrap()
                    .events[0]
                    .time
            })
            .collect();
        let est = EstimateWithCI::from_samples(&times).unwrap();
        assert!(est.covers(1.0 / (a * b), 4.0), "{est:?}");
    }

    #[test]
    fn trajectory_keeps_mass_and_power_sums_monotone() {
        let x = mv(&[0.9, 0.7, 0.7, 0.4, 0.2, 0.05]);
        let tr = simulate_coalescent(&x, 3.0, 17).unwrap();
        let times: Vec<f64> = (0..=30).map(|k| k as f64 * 0.1).collect();
        let states = tr.masses_at(&times);
        let mut prev = [0.0f64; 4];
        for state in states {
            let s1: f64 = state.iter().sum();
            assert!((s1 - x.s1()).abs() < 1e-12);
            for (slot, k) in prev.iter_mut().zip(2..6) {
                let sk = crate::mass::power_sum(&state, k);
                assert!(sk + 1e-12 >= *slot);
                *slot = sk;
            }
        }
    }

    fn partition_counts<F: FnMut(u64) -> ComponentPartition>(
        reps: u64,
        mut f: F,
    ) -> BTreeMap<u64, u64> {
        let mut counts = BTreeMap::new();
        for r in 0..reps {
            *counts.entry(f(r).key().unwrap()).or_insert(0) += 1;
        }
        counts
    }

    #[test]
    fn skipping_connected_pairs_keeps_the_partition_law() {
        let x = mv(&[1.2, 1.0, 0.8, 0.6, 0.5]);
        let t = 0.9;
        let reps = 100_000;
        let skip = partition_counts(reps, |r| percolate(&x, t, &mut rng::stream(r, 1), true));
        let full = partition_counts(reps, |r| percolate(&x, t, &mut rng::stream(r, 2), false));
        let keys: Vec<u64> = skip
            .keys()
            .chain(full.keys())
            .copied()
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        let a: Vec<u64> = keys.iter().map(|k| *skip.get(k).unwrap_or(&0)).collect();
        let b: Vec<u64> = keys.iter().map(|k| *full.get(k).unwrap_or(&0)).collect();
        let (stat, dof) = crate::stats::chi_squared_two_sample(&a, &b).unwrap();
        assert!(p_value(stat, dof) > 0.01, "stat {stat} dof {dof}");
    }

    #[test]
    fn graph_sampler_and_dynamics_match_the_exact_law() {
        let x = mv(&[4.0, 3.0, 2.0, 1.0]);
        let t = 0.08;
        let law = exact_partition_law(&x, t).unwrap();
        let probs: Vec<f64> = law.iter().map(|(_, p)| *p).collect();
        let reps = 100_000;
        let graph = partition_counts(reps, |r| sample_components(&x, t, r).unwrap());
        let chain = partition_counts(reps, |r| simulate_coalescent(&x, t, r).unwrap().final_state);
        for counts in [&graph, &chain] {
            let obs: Vec<u64> = law
                .iter()
                .map(|(k, _)| *counts.get(k).unwrap_or(&0))
                .collect();
            assert_eq!(obs.iter().sum::<u64>(), reps);
            let (stat, dof) = crate::stats::chi_squared_gof(&obs, &probs, 5.0).unwrap();
            assert!(p_value(stat, dof) > 0.01, "stat {stat} dof {dof}");
        }
    }
}
