//! Moment constants, generator identities, Monte Carlo moment estimators and
//! the one-sided verdicts comparing them with the closed-form bounds.

#![allow(non_snake_case)]

mod bounds;
mod constants;
mod generator;

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

pub use bounds::{
    bound_Sn, bound_connect, bound_joint, bound_negative_time, bound_negative_time_with,
    bound_npoint, subcritical_gap,
};
pub use constants::{stirling2_table, ConstantsTable};
pub use generator::{generator_closed_odd, generator_closed_product, generator_direct, Observable};

use crate::error::{invalid, Result};
use crate::excursion::excursions_until_extinction;
use crate::graphsim::{
    exact_connect_prob, mc_connect_prob, sample_components, simulate_coalescent, ENUMERATION_CAP,
};
use crate::mass::{power_sum, MassVector, ParamTriple};
use crate::rng;
use crate::stats::{EstimateWithCI, Welford};

/// Functionals of the coalescent state estimated by Monte Carlo.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Functional {
    /// `S_k`.
    PowerSum(u32),
    /// `S_n · S_m`.
    Joint { n: u32, m: u32 },
    /// `S_2^{n/2} = ‖X‖^n`.
    NormPower(u32),
}

impl Functional {
    pub fn eval(self, masses: &[f64]) -> f64 {
        match self {
            Functional::PowerSum(k) => power_sum(masses, k),
            Functional::Joint { n, m } => power_sum(masses, n) * power_sum(masses, m),
            Functional::NormPower(n) => power_sum(masses, 2).powf(n as f64 / 2.0),
        }
    }

    fn validate(self) -> Result<Self> {
        match self {
            Functional::PowerSum(0)
            | Functional::Joint { n: 0, .. }
            | Functional::Joint { m: 0, .. } => Err(invalid!("power sums need index >= 1")),
            _ => Ok(self),
        }
    }
}

/// Which sampler produces the state at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sampler {
    /// Random graph with independent edges.
    #[default]
    Graph,
    /// Exponential-clock merge dynamics run to `t`.
    Dynamics,
}

impl Sampler {
    /// Component masses at time `t` for replicate seed `seed`.
    pub fn state(self, x: &MassVector, t: f64, seed: u64) -> Result<MassVector> {
        Ok(match self {
            Sampler::Graph => sample_components(x, t, seed)?.component_masses().clone(),
            Sampler::Dynamics => simulate_coalescent(x, t, seed)?
                .final_state
                .component_masses()
                .clone(),
        })
    }
}

/// Mean and SE of `f(X(t; x))` over `reps` replicates.
pub fn estimate_functional(
    x: &MassVector,
    t: f64,
    f: Functional,
    sampler: Sampler,
    reps: usize,
    seed: u64,
) -> Result<EstimateWithCI> {
    let f = f.validate()?;
    if reps < 2 {
        return Err(invalid!("need at least 2 replicates, got {reps}"));
    }
    let mut acc = Welford::default();
    for r in 0..reps as u64 {
        acc.push(f.eval(&sampler.state(x, t, rng::replicate_seed(seed, r))?));
    }
    acc.finish()
}

/// `E S_k(t)` from the random-graph sampler.
pub fn estimate_ESk(
    x: &MassVector,
    t: f64,
    k: u32,
    reps: usize,
    seed: u64,
) -> Result<EstimateWithCI> {
    estimate_functional(x, t, Functional::PowerSum(k), Sampler::Graph, reps, seed)
}

/// Per-path value of `g(X(t)) − g(x) − ∫₀ᵗ Γg(X(r)) dr` with the integral by
/// the trapezoid rule on `grid_points` equally spaced times, plus `g(X(t))`.
pub fn martingale_path(
    x: &MassVector,
    t: f64,
    g: Observable,
    grid_points: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let g = g.validate()?;
    if grid_points < 2 {
        return Err(invalid!(
            "time grid needs at least 2 points, got {grid_points}"
        ));
    }
    let traj = simulate_coalescent(x, t, seed)?;
    let times: Vec<f64> = (0..grid_points)
        .map(|i| t * i as f64 / (grid_points - 1) as f64)
        .collect();
    let states = traj.masses_at(&times);
    let dt = t / (grid_points - 1) as f64;
    let mut integral = 0.0;
    for (i, state) in states.iter().enumerate() {
        let w = if i == 0 || i == grid_points - 1 {
            0.5
        } else {
            1.0
        };
        integral += w * dt * generator_direct(state, g)?;
    }
    let terminal = g.eval(&states[grid_points - 1]);
    Ok((terminal - g.eval(x) - integral, terminal))
}

/// Residual of the martingale identity and the terminal mean `E g(X(t))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MartingaleReport {
    pub residual: EstimateWithCI,
    pub terminal: EstimateWithCI,
}

/// Monte Carlo residual `E g(X(t)) − g(x) − ∫₀ᵗ E Γg(X(r)) dr`, expected 0.
pub fn martingale_residual(
    x: &MassVector,
    t: f64,
    g: Observable,
    reps: usize,
    grid_points: usize,
    seed: u64,
) -> Result<MartingaleReport> {
    subcritical_gap(x, t)?;
    if reps < 2 {
        return Err(invalid!("need at least 2 replicates, got {reps}"));
    }
    if t == 0.0 {
        let exact = EstimateWithCI {
            mean: 0.0,
            std_error: 0.0,
            reps,
        };
        let terminal = EstimateWithCI {
            mean: g.validate()?.eval(x),
            std_error: 0.0,
            reps,
        };
        return Ok(MartingaleReport {
            residual: exact,
            terminal,
        });
    }
    let mut residual = Welford::default();
    let mut terminal = Welford::default();
    for r in 0..reps as u64 {
        let (res, term) = martingale_path(x, t, g, grid_points, rng::replicate_seed(seed, r))?;
        residual.push(res);
        terminal.push(term);
    }
    Ok(MartingaleReport {
        residual: residual.finish()?,
        terminal: terminal.finish()?,
    })
}

/// Outcome of one bound check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub bound: f64,
    pub estimate: EstimateWithCI,
    /// `(bound − mean) / SE`; infinite for exact estimates below the bound.
    pub slack_sigmas: f64,
    pub pass: bool,
}

impl BoundReport {
    /// Passes iff `mean + 3·SE ≤ bound` (with `1e-12` float slack).
    pub fn evaluate(bound: f64, estimate: EstimateWithCI) -> Self {
        let gap = bound - estimate.mean;
        let slack_sigmas = if estimate.std_error > 0.0 {
            gap / estimate.std_error
        } else if gap >= -1e-12 {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        };
        let pass = estimate.mean + 3.0 * estimate.std_error <= bound + 1e-12;
        BoundReport {
            bound,
            estimate,
            slack_sigmas,
            pass,
        }
    }
}

/// Monte Carlo settings for [`check_bound`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSettings {
    pub reps: usize,
    pub seed: u64,
    /// Grid step for excursion paths.
    pub h: f64,
}

impl Default for McSettings {
    fn default() -> Self {
        McSettings {
            reps: 10_000,
            seed: 0,
            h: 1e-3,
        }
    }
}

/// Inequalities that [`check_bound`] can verify.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundCheck {
    /// `P(i ∼ j) ≤ x_i x_j t / (1 − t‖x‖²)`.
    Connect {
        x: MassVector,
        t: f64,
        i: usize,
        j: usize,
    },
    /// `P(i_1 ∼ ⋯ ∼ i_n)` against the n-point bound.
    NPoint {
        x: MassVector,
        t: f64,
        targets: Vec<usize>,
    },
    /// `E S_n(t)` against the moment bound.
    Sn { x: MassVector, t: f64, n: u32 },
    /// `E[S_n(t) S_m(t)]` against [`bound_joint`].
    Joint {
        x: MassVector,
        t: f64,
        n: u32,
        m: u32,
    },
    /// `E Σ|γ|²` of `B^{κ,t,c}`, `t < 0`, against `D_2 / (−t)`.
    NegativeTime { p: ParamTriple, d2: f64 },
}

/// Evaluates the bound and its estimate: exact enumeration for connection
/// events on at most [`ENUMERATION_CAP`] blocks, Monte Carlo otherwise.
pub fn check_bound(
    kind: &BoundCheck,
    table: &ConstantsTable,
    mc: McSettings,
) -> Result<BoundReport> {
    let connect = |x: &MassVector, t: f64, targets: &[usize]| -> Result<EstimateWithCI> {
        if x.len() <= ENUMERATION_CAP {
            Ok(EstimateWithCI::exact(exact_connect_prob(x, t, targets)?))
        } else {
            mc_connect_prob(x, t, targets, mc.reps, mc.seed)
        }
    };
    let (bound, estimate) = match kind {
        BoundCheck::Connect { x, t, i, j } => {
            let bound = x[*i] * x[*j] * bound_connect(x, *t)?;
            (bound, connect(x, *t, &[*i, *j])?)
        }
        BoundCheck::NPoint { x, t, targets } => (
            bound_npoint(x, *t, targets, table)?,
            connect(x, *t, targets)?,
        ),
        BoundCheck::Sn { x, t, n } => (
            bound_Sn(x, *t, *n, table)?,
            estimate_functional(
                x,
                *t,
                Functional::PowerSum(*n),
                Sampler::Graph,
                mc.reps,
                mc.seed,
            )?,
        ),
        BoundCheck::Joint { x, t, n, m } => (
            bound_joint(x, *t, *n, *m, table)?,
            estimate_functional(
                x,
                *t,
                Functional::Joint { n: *n, m: *m },
                Sampler::Graph,
                mc.reps,
                mc.seed,
            )?,
        ),
        BoundCheck::NegativeTime { p, d2 } => {
            let bound = bound_negative_time_with(p.t, *d2)?;
            let mut acc = Welford::default();
            for r in 0..mc.reps as u64 {
                acc.push(
                    excursions_until_extinction(p, mc.h, 1, rng::replicate_seed(mc.seed, r))?
                        .sum_sq(),
                );
            }
            (bound, acc.finish()?)
        }
    };
    Ok(BoundReport::evaluate(bound, estimate))
}
