//! Exact oracles by summing over every edge configuration of a small graph.
//!
//! With at most [`ENUMERATION_CAP`] vertices there are at most 21 pair
//! coordinates, so a full sweep visits ≤ 2²¹ configurations. The sweep is a
//! depth-first walk over the pairs carrying the running product of
//! `p_ij` / `1 - p_ij`, which also prunes branches of zero weight.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::{check_targets, partition_key};
use crate::error::{invalid, Error, Result};
use crate::mass::MassVector;

/// Largest vertex count accepted by the enumeration oracles.
pub const ENUMERATION_CAP: usize = 7;

struct Pairs {
    n: usize,
    ends: Vec<(usize, usize)>,
    open: Vec<f64>,
}

impl Pairs {
    fn new(x: &MassVector, t: f64) -> Result<Self> {
        if x.len() > ENUMERATION_CAP {
            return Err(Error::Capacity {
                vertices: x.len(),
                cap: ENUMERATION_CAP,
            });
        }
        if t.is_nan() || t < 0.0 {
            return Err(invalid!("t must be >= 0, got {t}"));
        }
        let n = x.len();
        let mut ends = Vec::new();
        let mut open = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                ends.push((i, j));
                open.push(-(-x[i] * x[j] * t).exp_m1());
            }
        }
        Ok(Pairs { n, ends, open })
    }

    /// Calls `f(open_edge_mask, adjacency, weight)` for every configuration of
    /// positive probability.
    fn for_each<F: FnMut(u32, &[u8; ENUMERATION_CAP], f64)>(&self, mut f: F) {
        let adj = [0u8; ENUMERATION_CAP];
        self.walk(0, 0, adj, 1.0, &mut f);
    }

    fn walk<F: FnMut(u32, &[u8; ENUMERATION_CAP], f64)>(
        &self,
        k: usize,
        mask: u32,
        adj: [u8; ENUMERATION_CAP],
        weight: f64,
        f: &mut F,
    ) {
        if k == self.ends.len() {
            f(mask, &adj, weight);
            return;
        }
        let p = self.open[k];
        if p < 1.0 {
            self.walk(k + 1, mask, adj, weight * (1.0 - p), f);
        }
        if p > 0.0 {
            let (i, j) = self.ends[k];
            let mut with = adj;
            with[i] |= 1 << j;
            with[j] |= 1 << i;
            self.walk(k + 1, mask | (1 << k), with, weight * p, f);
        }
    }
}

/// Vertex bitmask of the component containing `v`.
fn component(adj: &[u8; ENUMERATION_CAP], v: usize) -> u8 {
    let mut seen = 1u8 << v;
    let mut frontier = seen;
    while frontier != 0 {
        let u = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let fresh = adj[u] & !seen;
        seen |= fresh;
        frontier |= fresh;
    }
    seen
}

fn target_mask(n: usize, targets: &[usize]) -> Result<u8> {
    check_targets(n, targets)?;
    Ok(targets.iter().fold(0u8, |m, &i| m | (1 << i)))
}

/// Exact `P(i_1 ∼ i_2 ∼ ⋯ ∼ i_n)`. A singleton target set has probability 1.
pub fn exact_connect_prob(x: &MassVector, t: f64, targets: &[usize]) -> Result<f64> {
    Ok(exact_connect_probs(x, t, &[targets])?[0])
}

/// [`exact_connect_prob`] for several target sets in one sweep.
pub fn exact_connect_probs<T: AsRef<[usize]>>(
    x: &MassVector,
    t: f64,
    target_sets: &[T],
) -> Result<Vec<f64>> {
    let pairs = Pairs::new(x, t)?;
    let masks = target_sets
        .iter()
        .map(|ts| {
            let ts = ts.as_ref();
            target_mask(pairs.n, ts).map(|m| (ts[0], m))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut probs = alloc::vec![0.0; masks.len()];
    pairs.for_each(|_, adj, w| {
        for (p, &(root, mask)) in probs.iter_mut().zip(&masks) {
            if component(adj, root) & mask == mask {
                *p += w;
            }
        }
    });
    for (p, &(_, mask)) in probs.iter_mut().zip(&masks) {
        if mask.count_ones() == 1 {
            *p = 1.0;
        }
    }
    Ok(probs)
}

/// Exact law of the component partition, keyed by
/// [`ComponentPartition::key`](super::ComponentPartition::key), in key order.
pub fn exact_partition_law(x: &MassVector, t: f64) -> Result<Vec<(u64, f64)>> {
    let pairs = Pairs::new(x, t)?;
    let n = pairs.n;
    let mut law: BTreeMap<u64, f64> = BTreeMap::new();
    pairs.for_each(|_, adj, w| {
        let mut labels = [usize::MAX; ENUMERATION_CAP];
        let mut next = 0;
        for v in 0..n {
            if labels[v] == usize::MAX {
                let mut comp = component(adj, v);
                while comp != 0 {
                    labels[comp.trailing_zeros() as usize] = next;
                    comp &= comp - 1;
                }
                next += 1;
            }
        }
        let key = partition_key(&labels[..n]).expect("n <= 16");
        *law.entry(key).or_insert(0.0) += w;
    });
    Ok(law.into_iter().collect())
}

/// Exact probability that every pair `(i_k, j_k)` is connected, all through
/// mutually edge-disjoint paths.
pub fn exact_disjoint_connect_prob(
    x: &MassVector,
    t: f64,
    pairs: &[(usize, usize)],
) -> Result<f64> {
    let table = Pairs::new(x, t)?;
    let n = table.n;
    for &(a, b) in pairs {
        if a >= n || b >= n {
            return Err(invalid!("pair ({a}, {b}) out of range for {n} blocks"));
        }
        if a == b {
            return Err(invalid!(
                "disjoint connection needs distinct endpoints, got ({a}, {a})"
            ));
        }
    }
    let mut edge_index = [[0u8; ENUMERATION_CAP]; ENUMERATION_CAP];
    for (k, &(i, j)) in table.ends.iter().enumerate() {
        edge_index[i][j] = k as u8;
        edge_index[j][i] = k as u8;
    }
    let mut prob = 0.0;
    table.for_each(|open, adj, w| {
        if pairs
            .iter()
            .all(|&(a, b)| component(adj, a) & (1 << b) != 0)
            && disjoint_system(adj, &edge_index, open, pairs)
        {
            prob += w;
        }
    });
    Ok(prob)
}

/// Backtracking search for edge-disjoint paths serving `pairs` in order,
/// using only edges in `free`.
fn disjoint_system(
    adj: &[u8; ENUMERATION_CAP],
    edge_index: &[[u8; ENUMERATION_CAP]; ENUMERATION_CAP],
    free: u32,
    pairs: &[(usize, usize)],
) -> bool {
    let Some((&(a, b), rest)) = pairs.split_first() else {
        return true;
    };
    if rest.is_empty() {
        // last pair: any path in the remaining edges will do
        return reachable(adj, edge_index, free, a, b);
    }
    let mut found = false;
    simple_paths(adj, edge_index, free, a, b, 1 << a, 0, &mut |used| {
        found = disjoint_system(adj, edge_index, free & !used, rest);
        found
    });
    found
}

fn reachable(
    adj: &[u8; ENUMERATION_CAP],
    edge_index: &[[u8; ENUMERATION_CAP]; ENUMERATION_CAP],
    free: u32,
    a: usize,
    b: usize,
) -> bool {
    let mut seen = 1u8 << a;
    let mut frontier = seen;
    while frontier != 0 {
        let u = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let mut nbrs = adj[u] & !seen;
        while nbrs != 0 {
            let v = nbrs.trailing_zeros() as usize;
            nbrs &= nbrs - 1;
            if free & (1 << edge_index[u][v]) != 0 {
                seen |= 1 << v;
                frontier |= 1 << v;
            }
        }
    }
    seen & (1 << b) != 0
}

/// Enumerates simple paths `u → b` over free edges; `on_path(edges)` returns
/// `true` to stop the search.
#[allow(clippy::too_many_arguments)]
fn simple_paths<F: FnMut(u32) -> bool>(
    adj: &[u8; ENUMERATION_CAP],
    edge_index: &[[u8; ENUMERATION_CAP]; ENUMERATION_CAP],
    free: u32,
    u: usize,
    b: usize,
    visited: u8,
    used: u32,
    on_path: &mut F,
) -> bool {
    if u == b {
        return on_path(used);
    }
    let mut nbrs = adj[u] & !visited;
    while nbrs != 0 {
        let v = nbrs.trailing_zeros() as usize;
        nbrs &= nbrs - 1;
        let e = 1u32 << edge_index[u][v];
        if free & e == 0 {
            continue;
        }
        if simple_paths(
            adj,
            edge_index,
            free,
            v,
            b,
            visited | (1 << v),
            used | e,
            on_path,
        ) {
            return true;
        }
    }
    false
}
