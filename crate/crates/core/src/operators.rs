//! Colour-and-collapse: Poisson-mark the blocks with one colour per rate
//! `c*_j` (rate `c*_j` per unit mass) and merge every group of blocks that
//! share a colour.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use rand::RngExt;

use crate::error::{invalid, Result};
use crate::excursion::{extract_excursions, reflect, resolution_horizon, sample_W, ExcursionList};
use crate::graphsim::Dsu;
use crate::mass::{MassVector, ParamTriple};
use crate::rng::{self, SimRng, STREAM_MARKS};
use crate::stats::{ks_two_sample, EstimateWithCI, KsResult};

/// Presence of at least one mark of colour `j` on block `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorMarks {
    blocks: usize,
    colors: usize,
    marks: Vec<bool>,
}

impl ColorMarks {
    pub fn new(blocks: usize, colors: usize, marks: Vec<bool>) -> Result<Self> {
        if marks.len() != blocks * colors {
            return Err(invalid!(
                "{} marks for {blocks} blocks and {colors} colours",
                marks.len()
            ));
        }
        Ok(ColorMarks {
            blocks,
            colors,
            marks,
        })
    }

    pub fn get(&self, block: usize, color: usize) -> bool {
        self.marks[block * self.colors + color]
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn colors(&self) -> usize {
        self.colors
    }
}

/// `P(block of mass m carries a mark of rate c)`.
pub fn mark_probability(mass: f64, rate: f64) -> f64 {
    -(-rate * mass).exp_m1()
}

fn check_rates(cstar: &[f64]) -> Result<()> {
    if let Some(r) = cstar.iter().find(|r| !(**r >= 0.0) || !r.is_finite()) {
        return Err(invalid!(
            "colour rates must be finite and non-negative, got {r}"
        ));
    }
    Ok(())
}

/// Independent marks with `P(mark) = 1 − exp(−c*_j x_i)`.
pub fn sample_marks(x: &[f64], cstar: &[f64], rng: &mut SimRng) -> Result<ColorMarks> {
    check_rates(cstar)?;
    let mut marks = Vec::with_capacity(x.len() * cstar.len());
    for &xi in x {
        for &c in cstar {
            marks.push(rng.random::<f64>() < mark_probability(xi, c));
        }
    }
    ColorMarks::new(x.len(), cstar.len(), marks)
}

/// Component labels after merging same-colour blocks, numbered by first
/// appearance.
pub fn collapse_labels(marks: &ColorMarks) -> Vec<usize> {
    let mut dsu = Dsu::new(marks.blocks);
    for j in 0..marks.colors {
        let mut first = None;
        for i in 0..marks.blocks {
            if marks.get(i, j) {
                match first {
                    None => first = Some(i),
                    Some(f) => {
                        dsu.union(f, i);
                    }
                }
            }
        }
    }
    dsu.labels()
}

/// Merged masses for the given marks.
pub fn collapse(x: &[f64], marks: &ColorMarks) -> Result<MassVector> {
    if marks.blocks != x.len() {
        return Err(invalid!(
            "marks cover {} blocks, masses {}",
            marks.blocks,
            x.len()
        ));
    }
    let labels = collapse_labels(marks);
    let groups = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut sums = vec![0.0; groups];
    for (&l, &m) in labels.iter().zip(x) {
        sums[l] += m;
    }
    MassVector::ord(sums)
}

/// `COL(x; c*)` with marks drawn from the seed's mark substream.
pub fn col(x: &MassVector, cstar: &MassVector, seed: u64) -> Result<MassVector> {
    let mut rng = rng::stream(seed, STREAM_MARKS);
    col_with(x, cstar, &mut rng)
}

/// [`col`] drawing from a caller-held generator.
pub fn col_with(x: &[f64], cstar: &[f64], rng: &mut SimRng) -> Result<MassVector> {
    let marks = sample_marks(x, cstar, rng)?;
    collapse(x, &marks)
}

/// Setup of a colour-and-collapse consistency run: side (a) colours the
/// excursion lengths of `B^{κ,u,c}` at rate `c*`; side (b) takes the
/// excursion lengths of `B^{κ, u + c*², c ⋈ (c*)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ColSetup {
    pub kappa: f64,
    pub u: f64,
    pub c: MassVector,
    pub cstar: f64,
    pub h: f64,
    /// Fixed horizon; `None` runs both sides to the
    /// [`resolution_horizon`](crate::excursion::resolution_horizon) of side (a).
    pub horizon: Option<f64>,
}

impl ColSetup {
    fn sides(&self) -> Result<(ParamTriple, ParamTriple, MassVector)> {
        if !(self.kappa > 0.0) {
            return Err(invalid!("kappa must be positive, got {}", self.kappa));
        }
        check_rates(&[self.cstar])?;
        let star = MassVector::ord(vec![self.cstar])?;
        let left = ParamTriple::new(self.kappa, self.u, self.c.clone())?;
        let right = ParamTriple::new(
            self.kappa,
            self.u + self.cstar * self.cstar,
            self.c.join(&star),
        )?;
        Ok((left, right, star))
    }

    fn excursions(&self, p: &ParamTriple, seed: u64) -> Result<ExcursionList> {
        match self.horizon {
            None => {
                let horizon = resolution_horizon(self.kappa, self.u, self.h)?;
                extract_excursions(&reflect(&sample_W(p, horizon, self.h, seed)?), 5.0 * self.h)
            }
            Some(t) => extract_excursions(&reflect(&sample_W(p, t, self.h, seed)?), 5.0 * self.h),
        }
    }
}

/// One replicate of both sides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColPair {
    pub collapsed_sum_sq: f64,
    pub direct_sum_sq: f64,
    pub collapsed_censored: bool,
    pub direct_censored: bool,
}

/// Draws replicate `seed`: independent paths for the two sides, censored
/// excursions left out of the colouring.
pub fn col_consistency_sample(setup: &ColSetup, seed: u64) -> Result<ColPair> {
    let (left, right, star) = setup.sides()?;
    let a_seed = rng::derive_seed(seed, 1);
    let a = setup.excursions(&left, a_seed)?;
    let lengths = MassVector::ord(a.lengths())?;
    let collapsed = col(&lengths, &star, a_seed)?;
    let b = setup.excursions(&right, rng::derive_seed(seed, 2))?;
    Ok(ColPair {
        collapsed_sum_sq: collapsed.s2(),
        direct_sum_sq: b.sum_sq(),
        collapsed_censored: a.is_censored(),
        direct_censored: b.is_censored(),
    })
}

/// Two-sample comparison of the replicates.
#[derive(Debug, Clone, PartialEq)]
pub struct ColConsistency {
    pub ks: KsResult,
    pub collapsed: EstimateWithCI,
    pub direct: EstimateWithCI,
    pub censored_fraction: f64,
}

impl ColConsistency {
    pub fn from_pairs(pairs: &[ColPair]) -> Result<Self> {
        let a: Vec<f64> = pairs.iter().map(|p| p.collapsed_sum_sq).collect();
        let b: Vec<f64> = pairs.iter().map(|p| p.direct_sum_sq).collect();
        let censored = pairs
            .iter()
            .filter(|p| p.collapsed_censored || p.direct_censored)
            .count();
        Ok(ColConsistency {
            ks: ks_two_sample(&a, &b)?,
            collapsed: EstimateWithCI::from_samples(&a)?,
            direct: EstimateWithCI::from_samples(&b)?,
            censored_fraction: censored as f64 / pairs.len() as f64,
        })
    }
}

/// Runs `reps` replicates sequentially.
pub fn col_consistency_experiment(
    setup: &ColSetup,
    reps: usize,
    seed: u64,
) -> Result<ColConsistency> {
    if reps < 2 {
        return Err(invalid!("need at least 2 replicates, got {reps}"));
    }
    let pairs = (0..reps as u64)
        .map(|r| col_consistency_sample(setup, rng::replicate_seed(seed, r)))
        .collect::<Result<Vec<_>>>()?;
    ColConsistency::from_pairs(&pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphsim::partition_key;
    use alloc::collections::BTreeMap;
    use proptest::prelude::*;

    fn mv(v: &[f64]) -> MassVector {
        MassVector::ord(v.to_vec()).unwrap()
    }

    #[test]
    fn no_colours_leaves_x_alone() {
        let x = mv(&[3.0, 2.0, 1.0]);
        assert_eq!(col(&x, &MassVector::empty(), 4).unwrap(), x);
    }

    #[test]
    fn single_block_is_fixed() {
        let x = mv(&[2.5]);
        for seed in 0..10 {
            assert_eq!(col(&x, &mv(&[1.0, 3.0]), seed).unwrap(), x);
        }
    }

    #[test]
    fn rejects_bad_rates() {
        let mut rng = rng::stream(0, STREAM_MARKS);
        assert!(sample_marks(&[1.0], &[-1.0], &mut rng).is_err());
        assert!(sample_marks(&[1.0], &[f64::NAN], &mut rng).is_err());
    }

    #[test]
    fn two_block_merge_probability() {
        let (a, b, c) = (1.0, 0.5, 0.8);
        let x = mv(&[a, b]);
        let n = 100_000;
        let merged = (0..n)
            .filter(|&s| col(&x, &mv(&[c]), s).unwrap().len() == 1)
            .count();
        let p = mark_probability(a, c) * mark_probability(b, c);
        let est = merged as f64 / n as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((est - p).abs() < 4.0 * se, "{est} vs {p}");
    }

    /// Exact law of the partition after colouring with `rates` at once.
    fn simultaneous_law(x: &[f64], rates: &[f64]) -> BTreeMap<u64, f64> {
        let k = x.len() * rates.len();
        let mut law = BTreeMap::new();
        for pattern in 0u32..(1 << k) {
            let mut w = 1.0;
            let mut marks = Vec::with_capacity(k);
            for (i, &xi) in x.iter().enumerate() {
                for (j, &c) in rates.iter().enumerate() {
                    let on = pattern & (1 << (i * rates.len() + j)) != 0;
                    let p = mark_probability(xi, c);
                    w *= if on { p } else { 1.0 - p };
                    marks.push(on);
                }
            }
            let labels = collapse_labels(&ColorMarks::new(x.len(), rates.len(), marks).unwrap());
            *law.entry(partition_key(&labels).unwrap()).or_insert(0.0) += w;
        }
        law
    }

    /// Exact law after colouring at `c1`, then colouring the merged blocks at `c2`.
    fn sequential_law(x: &[f64], c1: f64, c2: f64) -> BTreeMap<u64, f64> {
        let n = x.len();
        let mut law = BTreeMap::new();
        for first in 0u32..(1 << n) {
            let mut w = 1.0;
            let mut marks = Vec::new();
            for (i, &xi) in x.iter().enumerate() {
                let on = first & (1 << i) != 0;
                let p = mark_probability(xi, c1);
                w *= if on { p } else { 1.0 - p };
                marks.push(on);
            }
            let labels = collapse_labels(&ColorMarks::new(n, 1, marks).unwrap());
            let groups = labels.iter().max().unwrap() + 1;
            let mut masses = vec![0.0; groups];
            for (&l, &m) in labels.iter().zip(x) {
                masses[l] += m;
            }
            for second in 0u32..(1 << groups) {
                let mut w2 = w;
                let mut marks2 = Vec::new();
                for (g, &m) in masses.iter().enumerate() {
                    let on = second & (1 << g) != 0;
                    let p = mark_probability(m, c2);
                    w2 *= if on { p } else { 1.0 - p };
                    marks2.push(on);
                }
                let merged = collapse_labels(&ColorMarks::new(groups, 1, marks2).unwrap());
                let full: Vec<usize> = labels.iter().map(|&l| merged[l]).collect();
                let mut relabel = Dsu::new(n);
                for i in 0..n {
                    for j in i + 1..n {
                        if full[i] == full[j] {
                            relabel.union(i, j);
                        }
                    }
                }
                *law.entry(partition_key(&relabel.labels()).unwrap())
                    .or_insert(0.0) += w2;
            }
        }
        law
    }

    #[test]
    fn two_colours_equal_two_sequential_passes() {
        for x in [[1.0, 0.6, 0.3], [2.0, 2.0, 0.1], [0.4, 0.4, 0.4]] {
            let a = simultaneous_law(&x, &[0.7, 1.3]);
            let b = sequential_law(&x, 0.7, 1.3);
            assert_eq!(a.keys().collect::<Vec<_>>(), b.keys().collect::<Vec<_>>());
            for (k, p) in &a {
                assert!(
                    (p - b[k]).abs() < 1e-12,
                    "partition {k:#x}: {p} vs {}",
                    b[k]
                );
            }
        }
    }

    #[test]
    fn zero_colour_rate_gives_identical_sides() {
        let setup = ColSetup {
            kappa: 1.0,
            u: -1.0,
            c: MassVector::empty(),
            cstar: 0.0,
            h: 0.01,
            horizon: None,
        };
        let (left, right, _) = setup.sides().unwrap();
        assert_eq!(left.t, right.t);
        for seed in 0..10 {
            let p = col_consistency_sample(&setup, seed).unwrap();
            assert!(p.collapsed_sum_sq >= 0.0 && p.direct_sum_sq >= 0.0);
        }
    }

    #[test]
    fn consistency_needs_diffusion() {
        let setup = ColSetup {
            kappa: 0.0,
            u: -1.0,
            c: MassVector::empty(),
            cstar: 0.5,
            h: 0.01,
            horizon: None,
        };
        assert!(col_consistency_sample(&setup, 0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn col_preserves_mass_and_grows_s2(v in proptest::collection::vec(0.01f64..3.0, 1..12),
                                           rates in proptest::collection::vec(0.0f64..2.0, 0..4),
                                           seed in any::<u64>()) {
            let x = MassVector::ord(v).unwrap();
            let y = col(&x, &MassVector::ord(rates).unwrap(), seed).unwrap();
            prop_assert!((y.s1() - x.s1()).abs() < 1e-12 * (1.0 + x.s1()));
            if y.len() == x.len() {
                prop_assert!((y.s2() - x.s2()).abs() < 1e-12 * (1.0 + x.s2()));
            } else {
                prop_assert!(y.s2() > x.s2());
            }
        }
    }
}
