//! Discretised paths of
//!
//! ```text
//! W(s) = √κ·BM(s) + t·s − κs²/2 + V(s),   V(s) = Σ_i (c_i·1{ξ_i ≤ s} − c_i²·s),
//! ```
//!
//! with independent `ξ_i ~ Exp(c_i)`, their reflection `B = W − min W` above
//! the running minimum, and the excursions of `B`.
//!
//! Paths live on the grid `0, h, 2h, …`. Brownian increments are i.i.d.
//! Gaussians per step and a jump is applied at the first grid point at or
//! after its exact time. Each sampler draws its Brownian increments, jump
//! clocks and thinning marks from separate substreams of one seed, which is
//! what makes the couplings below (σ, the shifted path, the η-thinned path)
//! exact on shared randomness.

#![allow(non_snake_case)]

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use rand::RngExt;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{invalid, Result};
use crate::mass::{MassVector, ParamTriple};
use crate::rng::{self, SimRng, STREAM_BROWNIAN, STREAM_ETA, STREAM_JUMPS};

/// A realised jump of `V`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    /// Exact jump time `ξ_i`.
    pub time: f64,
    /// Jump size `c_i`.
    pub size: f64,
    /// Index `i` into the rate vector.
    pub index: usize,
}

/// Values of a path on the grid `0, h, …, (len−1)·h`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath {
    h: f64,
    values: Vec<f64>,
    jumps: Option<Vec<Jump>>,
}

impl SampledPath {
    /// Wraps hand-made grid values (no jump record).
    pub fn from_values(h: f64, values: Vec<f64>) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(invalid!("grid step must be positive, got {h}"));
        }
        if values.is_empty() {
            return Err(invalid!("a path needs at least the value at time 0"));
        }
        Ok(SampledPath {
            h,
            values,
            jumps: None,
        })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Last grid time.
    pub fn horizon(&self) -> f64 {
        (self.values.len() - 1) as f64 * self.h
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.h
    }

    /// Jumps realised in `[0, horizon]`, sorted by time; `None` for paths
    /// without a jump record.
    pub fn jumps(&self) -> Option<&[Jump]> {
        self.jumps.as_deref()
    }
}

/// Excursion intervals `[l, r]` of a reflected path.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExcursionList {
    pub excursions: Vec<(f64, f64)>,
    /// The excursion still running at the horizon, if any.
    pub censored: Option<(f64, f64)>,
}

impl ExcursionList {
    pub fn lengths(&self) -> Vec<f64> {
        self.excursions.iter().map(|(l, r)| r - l).collect()
    }

    /// `Σ |γ|²` over complete excursions.
    pub fn sum_sq(&self) -> f64 {
        self.excursions.iter().map(|(l, r)| (r - l) * (r - l)).sum()
    }

    pub fn is_censored(&self) -> bool {
        self.censored.is_some()
    }
}

/// `Σ |γ|²` over the complete excursions of `e`.
pub fn sum_sq_excursions(e: &ExcursionList) -> f64 {
    e.sum_sq()
}

fn check_grid(horizon: f64, h: f64) -> Result<()> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(invalid!("grid step must be positive, got {h}"));
    }
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(invalid!("horizon must be positive, got {horizon}"));
    }
    Ok(())
}

/// Number of grid points in `[0, horizon]`.
fn grid_len(horizon: f64, h: f64) -> usize {
    (horizon / h + 1e-9).floor() as usize + 1
}

/// Grid step no larger than `h` that puts `t_prime` exactly on the grid.
pub fn aligned_step(t_prime: f64, h: f64) -> f64 {
    t_prime / (t_prime / h).ceil()
}

/// Exact jump clocks `ξ_i`; blocks of rate 0 never jump. One draw is
/// consumed per entry so that indices stay aligned across rate vectors.
fn jump_clocks(c: &[f64], seed: u64) -> Vec<f64> {
    let mut rng = rng::stream(seed, STREAM_JUMPS);
    c.iter()
        .map(|&ci| {
            let e: f64 = rng.sample(Exp1);
            if ci > 0.0 {
                e / ci
            } else {
                f64::INFINITY
            }
        })
        .collect()
}

/// Grid index at which a jump at `xi` is applied.
fn jump_step(xi: f64, h: f64) -> usize {
    if xi.is_finite() {
        (xi / h).ceil() as usize
    } else {
        usize::MAX
    }
}

/// A jump scheduled on the grid.
#[derive(Debug, Clone, Copy)]
struct Scheduled {
    step: usize,
    jump: Jump,
}

fn schedule(c: &[f64], xi: &[f64], h: f64, keep: impl Fn(usize) -> bool) -> Vec<Scheduled> {
    let mut out: Vec<Scheduled> = c
        .iter()
        .zip(xi)
        .enumerate()
        .filter(|&(i, (_, x))| x.is_finite() && keep(i))
        .map(|(index, (&size, &time))| Scheduled {
            step: jump_step(time, h),
            jump: Jump { time, size, index },
        })
        .collect();
    out.sort_by(|a, b| a.jump.time.total_cmp(&b.jump.time));
    out
}

/// Generates `W` one grid point at a time.
struct Stepper {
    rng: Option<SimRng>,
    sd: f64,
    substeps: u32,
    h: f64,
    drift_t: f64,
    kappa: f64,
    compensator: f64,
    jumps: Vec<Scheduled>,
    next_jump: usize,
    k: usize,
    bm: f64,
    jump_sum: f64,
}

impl Stepper {
    #[allow(clippy::too_many_arguments)]
    fn new(
        kappa: f64,
        drift_t: f64,
        c: &[f64],
        jumps: Vec<Scheduled>,
        h: f64,
        substeps: u32,
        seed: u64,
    ) -> Self {
        let rng = (kappa > 0.0).then(|| rng::stream(seed, STREAM_BROWNIAN));
        Stepper {
            rng,
            sd: (kappa * h / substeps as f64).sqrt(),
            substeps,
            h,
            drift_t,
            kappa,
            compensator: c.iter().map(|ci| ci * ci).sum(),
            jumps,
            next_jump: 0,
            k: 0,
            bm: 0.0,
            jump_sum: 0.0,
        }
    }

    /// Scaled Brownian value `√κ·BM(kh)` at the current point.
    fn brownian(&self) -> f64 {
        self.bm
    }

    fn value(&self) -> f64 {
        let s = self.k as f64 * self.h;
        self.bm + self.drift_t * s - 0.5 * self.kappa * s * s - self.compensator * s + self.jump_sum
    }

    /// Advances one grid step.
    fn advance(&mut self) {
        if let Some(rng) = self.rng.as_mut() {
            for _ in 0..self.substeps {
                let z: f64 = rng.sample(StandardNormal);
                self.bm += self.sd * z;
            }
        }
        self.k += 1;
        self.absorb_jumps();
    }

    fn absorb_jumps(&mut self) {
        while let Some(s) = self.jumps.get(self.next_jump) {
            if s.step > self.k {
                break;
            }
            self.jump_sum += s.jump.size;
            self.next_jump += 1;
        }
    }

    fn realised(&self) -> Vec<Jump> {
        self.jumps[..self.next_jump]
            .iter()
            .map(|s| s.jump)
            .collect()
    }
}

/// Runs a stepper over `len` grid points, recording values and optionally
/// the scaled Brownian component.
fn run(mut st: Stepper, len: usize, mut brownian: Option<&mut Vec<f64>>) -> SampledPath {
    st.absorb_jumps();
    let mut values = Vec::with_capacity(len);
    for k in 0..len {
        if k > 0 {
            st.advance();
        }
        values.push(st.value());
        if let Some(b) = brownian.as_deref_mut() {
            b.push(st.brownian());
        }
    }
    SampledPath {
        h: st.h,
        values,
        jumps: Some(st.realised()),
    }
}

fn check_rates(c: &MassVector) -> Result<()> {
    if c.iter().any(|ci| !ci.is_finite()) {
        return Err(invalid!("jump rates must be finite"));
    }
    Ok(())
}

/// Path of the compensated jump process `V^c` on `[0, horizon]`.
pub fn sample_V(c: &MassVector, horizon: f64, h: f64, seed: u64) -> Result<SampledPath> {
    check_grid(horizon, h)?;
    check_rates(c)?;
    let xi = jump_clocks(c, seed);
    let st = Stepper::new(0.0, 0.0, c, schedule(c, &xi, h, |_| true), h, 1, seed);
    Ok(run(st, grid_len(horizon, h), None))
}

/// Path of `W^{κ,t,c}` on `[0, horizon]`.
pub fn sample_W(p: &ParamTriple, horizon: f64, h: f64, seed: u64) -> Result<SampledPath> {
    sample_W_coarsened(p, horizon, h, 1, seed)
}

/// [`sample_W`] with each Brownian increment built from `substeps` finer
/// increments. With `substeps = 2` the result is the step-`h` restriction of
/// the step-`h/2` path drawn from the same seed, which couples the two grids
/// for refinement checks (the jump grid is still `h`).
pub fn sample_W_coarsened(
    p: &ParamTriple,
    horizon: f64,
    h: f64,
    substeps: u32,
    seed: u64,
) -> Result<SampledPath> {
    check_grid(horizon, h)?;
    check_rates(&p.c)?;
    if substeps == 0 {
        return Err(invalid!("substeps must be at least 1"));
    }
    let xi = jump_clocks(&p.c, seed);
    let st = Stepper::new(
        p.kappa,
        p.t,
        &p.c,
        schedule(&p.c, &xi, h, |_| true),
        h,
        substeps,
        seed,
    );
    Ok(run(st, grid_len(horizon, h), None))
}

/// `B(s) = W(s) − min_{r ≤ s} W(r)` on the grid.
pub fn reflect(w: &SampledPath) -> SampledPath {
    let mut running = f64::INFINITY;
    let values = w
        .values
        .iter()
        .map(|&v| {
            running = running.min(v);
            v - running
        })
        .collect();
    SampledPath {
        h: w.h,
        values,
        jumps: w.jumps.clone(),
    }
}

/// Maximal runs of `b > 0`, closed at the neighbouring grid zeros. Runs
/// shorter than `min_len` are dropped; a run still open at the horizon is
/// returned as `censored` regardless of its length.
pub fn extract_excursions(b: &SampledPath, min_len: f64) -> Result<ExcursionList> {
    if let Some(v) = b.values.iter().find(|v| !(**v >= 0.0)) {
        return Err(invalid!("reflected path must be non-negative, found {v}"));
    }
    let mut out = ExcursionList::default();
    let mut start: Option<usize> = None;
    for (k, &v) in b.values.iter().enumerate() {
        match (v > 0.0, start) {
            (true, None) => start = Some(k.saturating_sub(1)),
            (false, Some(l)) => {
                let (lt, rt) = (b.time(l), b.time(k));
                if rt - lt >= min_len {
                    out.excursions.push((lt, rt));
                }
                start = None;
            }
            _ => {}
        }
    }
    if let Some(l) = start {
        out.censored = Some((b.time(l), b.horizon()));
    }
    Ok(out)
}

fn check_positive_time(p: &ParamTriple) -> Result<()> {
    if !(p.kappa > 0.0) {
        return Err(invalid!("kappa must be positive, got {}", p.kappa));
    }
    if !(p.t > 0.0) {
        return Err(invalid!("t must be positive, got {}", p.t));
    }
    Ok(())
}

/// Outcome of a stopping-time sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sigma {
    Hit(f64),
    Censored,
}

impl Sigma {
    pub fn value(self) -> Option<f64> {
        match self {
            Sigma::Hit(s) => Some(s),
            Sigma::Censored => None,
        }
    }
}

/// First grid time `s ≥ 0` with `B(t′ + s) = 0`, `t′ = 2t/κ`, searched up
/// to `t′ + horizon`. The step is shrunk to [`aligned_step`] so `t′` is a
/// grid point, and simulation stops at the hit.
pub fn sigma_sample(p: &ParamTriple, horizon: f64, h: f64, seed: u64) -> Result<Sigma> {
    check_positive_time(p)?;
    check_grid(horizon, h)?;
    check_rates(&p.c)?;
    let t_prime = p.t_prime();
    let h = aligned_step(t_prime, h);
    let k0 = (t_prime / h).round() as usize;
    let last = k0 + grid_len(horizon, h) - 1;
    let xi = jump_clocks(&p.c, seed);
    let mut st = Stepper::new(
        p.kappa,
        p.t,
        &p.c,
        schedule(&p.c, &xi, h, |_| true),
        h,
        1,
        seed,
    );
    st.absorb_jumps();
    let mut floor = st.value();
    for _ in 0..k0 {
        st.advance();
        floor = floor.min(st.value());
    }
    loop {
        if st.value() <= floor {
            return Ok(Sigma::Hit((st.k - k0) as f64 * h));
        }
        if st.k == last {
            return Ok(Sigma::Censored);
        }
        st.advance();
    }
}

/// Result of one pathwise check of `B(t′ + s) = B_{t′+}(s)` for `s ≥ σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftCheck {
    pub sigma: Sigma,
    /// Grid points compared (those with `s ≥ σ`).
    pub compared: usize,
    /// Largest `|B(t′+s) − B_{t′+}(s)|` over the compared points.
    pub max_deviation: f64,
    pub passed: bool,
}

/// Builds `B(t′ + ·)` and the reflection of
/// `W_{t′+}(s) = √κ(BM(t′+s) − BM(t′)) − ts − κs²/2 + Σ_i (c_i·1{t′ < ξ_i ≤ t′+s} − c_i²s)`
/// from one set of Brownian increments and jump clocks, then compares them
/// for `s ≥ σ` with tolerance `1e-9·(1 + |B|)`. A censored σ passes
/// vacuously.
pub fn shift_identity_check(
    p: &ParamTriple,
    horizon: f64,
    h: f64,
    seed: u64,
) -> Result<ShiftCheck> {
    check_positive_time(p)?;
    check_grid(horizon, h)?;
    check_rates(&p.c)?;
    let t_prime = p.t_prime();
    let h = aligned_step(t_prime, h);
    let k0 = (t_prime / h).round() as usize;
    let len = k0 + grid_len(horizon, h);
    let xi = jump_clocks(&p.c, seed);
    let jumps = schedule(&p.c, &xi, h, |_| true);
    let mut bm = Vec::with_capacity(len);
    let st = Stepper::new(p.kappa, p.t, &p.c, jumps.clone(), h, 1, seed);
    let w = run(st, len, Some(&mut bm));
    let b = reflect(&w);

    let floor = w.values[..=k0]
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let sigma_k = (k0..len).find(|&k| w.values[k] <= floor);
    let Some(sigma_k) = sigma_k else {
        return Ok(ShiftCheck {
            sigma: Sigma::Censored,
            compared: 0,
            max_deviation: 0.0,
            passed: true,
        });
    };

    let compensator: f64 = p.c.iter().map(|ci| ci * ci).sum();
    let mut next = jumps.partition_point(|s| s.step <= k0);
    let mut jump_sum = 0.0;
    let mut running = f64::INFINITY;
    let mut max_deviation: f64 = 0.0;
    let mut passed = true;
    for j in 0..len - k0 {
        while let Some(s) = jumps.get(next) {
            if s.step > k0 + j {
                break;
            }
            jump_sum += s.jump.size;
            next += 1;
        }
        let s = j as f64 * h;
        let shifted =
            (bm[k0 + j] - bm[k0]) - p.t * s - 0.5 * p.kappa * s * s - compensator * s + jump_sum;
        running = running.min(shifted);
        if k0 + j >= sigma_k {
            let reflected = shifted - running;
            let dev = (b.values[k0 + j] - reflected).abs();
            max_deviation = max_deviation.max(dev);
            passed &= dev <= 1e-9 * (1.0 + reflected.abs());
        }
    }
    Ok(ShiftCheck {
        sigma: Sigma::Hit((sigma_k - k0) as f64 * h),
        compared: len - sigma_k,
        max_deviation,
        passed,
    })
}

/// Thinning marks for [`eta_thinned_W`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EtaMode {
    /// `η_i ~ Bernoulli(e^{−c_i t′})`.
    #[default]
    Sample,
    /// `η_i = 1` for every `i`.
    ForceOne,
}

/// `W_η(s) = √κ·BM(s) − ts − κs²/2 + Σ_i (η_i c_i 1{ξ_i ≤ s} − c_i² s)`.
///
/// Brownian increments and jump clocks come from the same substreams as
/// [`sample_W`], so with [`EtaMode::ForceOne`] the result is exactly
/// `sample_W((κ, −t, c), horizon, h, seed)`.
pub fn eta_thinned_W(
    p: &ParamTriple,
    horizon: f64,
    h: f64,
    seed: u64,
    mode: EtaMode,
) -> Result<SampledPath> {
    check_positive_time(p)?;
    check_grid(horizon, h)?;
    check_rates(&p.c)?;
    let t_prime = p.t_prime();
    let eta: Vec<bool> = match mode {
        EtaMode::ForceOne => vec![true; p.c.len()],
        EtaMode::Sample => {
            let mut rng = rng::stream(seed, STREAM_ETA);
            p.c.iter()
                .map(|&ci| rng.random::<f64>() < (-ci * t_prime).exp())
                .collect()
        }
    };
    let xi = jump_clocks(&p.c, seed);
    let jumps = schedule(&p.c, &xi, h, |i| eta[i]);
    let st = Stepper::new(p.kappa, -p.t, &p.c, jumps, h, 1, seed);
    Ok(run(st, grid_len(horizon, h), None))
}

/// Which approximating sequence [`aldous_limic_sequence`] builds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SequenceMode {
    /// `n` entries `κ^{-1/3} n^{-2/3}` plus `c_i κ^{-2/3} n^{-1/3}`, `i ≤ l_n`.
    #[default]
    Brownian,
    /// Only the entries `c_i n^{-1/3}`, `i ≤ l_n` (the `κ = 0` regime).
    PureJump,
}

/// Initial states `x^n` whose coalescent at time `1/‖x^n‖² + t` converges
/// to the excursion lengths of `B^{κ,t,c}`.
pub fn aldous_limic_sequence(
    kappa: f64,
    c: &MassVector,
    n: usize,
    l_n: usize,
    mode: SequenceMode,
) -> Result<MassVector> {
    if n == 0 {
        return Err(invalid!("n must be at least 1"));
    }
    if l_n > c.len() {
        return Err(invalid!(
            "l_n = {l_n} exceeds the {} available rates",
            c.len()
        ));
    }
    let nf = n as f64;
    let mut x = Vec::new();
    match mode {
        SequenceMode::Brownian => {
            if !(kappa > 0.0) || !kappa.is_finite() {
                return Err(invalid!("kappa must be positive, got {kappa}"));
            }
            let scale = kappa.powf(-2.0 / 3.0) * nf.powf(-1.0 / 3.0);
            x.extend(c[..l_n].iter().map(|ci| ci * scale));
            x.extend(core::iter::repeat_n(
                kappa.powf(-1.0 / 3.0) * nf.powf(-2.0 / 3.0),
                n,
            ));
        }
        SequenceMode::PureJump => {
            let scale = nf.powf(-1.0 / 3.0);
            x.extend(c[..l_n].iter().map(|ci| ci * scale));
        }
    }
    MassVector::ord(x)
}

/// `V = M − A` with compensator `A` and bracket `⟨M⟩`, sampled on the grid
/// of the source path.
#[derive(Debug, Clone, PartialEq)]
pub struct VDecomposition {
    pub martingale: Vec<f64>,
    /// `A(s) = Σ c_i² (s − ξ_i)^+`.
    pub compensator: Vec<f64>,
    /// `⟨M⟩_s = Σ c_i³ (ξ_i ∧ s)`.
    pub bracket: Vec<f64>,
}

/// Doob–Meyer split of a path from [`sample_V`] with the same rates `c`.
pub fn decompose_V(v: &SampledPath, c: &MassVector) -> Result<VDecomposition> {
    let jumps = v
        .jumps()
        .ok_or_else(|| invalid!("path carries no jump record"))?;
    for j in jumps {
        if c.get(j.index) != Some(&j.size) {
            return Err(invalid!(
                "jump {} of size {} does not match the rate vector",
                j.index,
                j.size
            ));
        }
    }
    let len = v.values.len();
    let cube_total: f64 = c.iter().map(|ci| ci * ci * ci).sum();
    let mut martingale = Vec::with_capacity(len);
    let mut compensator = Vec::with_capacity(len);
    let mut bracket = Vec::with_capacity(len);
    let mut next = 0;
    // running sums over jumps already applied: Σc², Σc²ξ, Σc³, Σc³ξ
    let (mut sq, mut sq_xi, mut cube, mut cube_xi) = (0.0, 0.0, 0.0, 0.0);
    for k in 0..len {
        let s = v.time(k);
        while let Some(j) = jumps.get(next) {
            if jump_step(j.time, v.h) > k {
                break;
            }
            let c2 = j.size * j.size;
            sq += c2;
            sq_xi += c2 * j.time;
            cube += c2 * j.size;
            cube_xi += c2 * j.size * j.time;
            next += 1;
        }
        let a = (sq * s - sq_xi).max(0.0);
        compensator.push(a);
        martingale.push(v.values[k] + a);
        bracket.push(cube_xi + (cube_total - cube) * s);
    }
    Ok(VDecomposition {
        martingale,
        compensator,
        bracket,
    })
}

/// Smallest `T ≥ 1` with `|t|T + κT²/2 ≥ 10·√((κ + s₃(c))·T)`, for `t < 0`.
/// The right-hand side is ten standard deviations of the noise at `T`.
pub fn adaptive_horizon(p: &ParamTriple) -> Result<f64> {
    if !(p.t < 0.0) {
        return Err(invalid!("adaptive horizon needs t < 0, got {}", p.t));
    }
    let var = p.kappa + p.c.iter().map(|ci| ci * ci * ci).sum::<f64>();
    let ok = |x: f64| -p.t * x + 0.5 * p.kappa * x * x >= 10.0 * (var * x).sqrt();
    let mut hi = 1.0;
    if ok(hi) {
        return Ok(hi);
    }
    while !ok(hi) {
        hi *= 2.0;
    }
    let mut lo = hi / 2.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Excursions of `B^{κ,t,c}` for `t < 0` that start before the
/// [`adaptive_horizon`] `T`. The path is run to `2T` so excursions straddling
/// `T` can finish; one still open at `2T` is reported as censored.
/// Excursions shorter than `5h` are dropped.
pub fn excursions_until_extinction(
    p: &ParamTriple,
    h: f64,
    substeps: u32,
    seed: u64,
) -> Result<ExcursionList> {
    let horizon = adaptive_horizon(p)?;
    let w = sample_W_coarsened(p, 2.0 * horizon, h, substeps, seed)?;
    let mut e = extract_excursions(&reflect(&w), 5.0 * h)?;
    e.excursions.retain(|&(l, _)| l < horizon);
    e.censored = e.censored.filter(|&(l, _)| l < horizon);
    Ok(e)
}

/// Smallest `T ≥ 1` with `κT − t ≥ 1/√(5h)`. Past `T` the downward drift
/// slope `κs − t` makes typical excursions, of length about `(κs − t)^{-2}`,
/// shorter than the `5h` cutoff, so a longer run changes no kept excursion
/// except in rare cases.
pub fn resolution_horizon(kappa: f64, t: f64, h: f64) -> Result<f64> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(invalid!("resolution horizon needs kappa > 0, got {kappa}"));
    }
    check_grid(1.0, h)?;
    Ok(((1.0 / (5.0 * h).sqrt() + t) / kappa).max(1.0))
}

/// Excursions of `B^{κ,t,c}` on `[0, resolution_horizon]` with the `5h`
/// length cutoff; an excursion open at the horizon is censored.
pub fn excursions_to_resolution(p: &ParamTriple, h: f64, seed: u64) -> Result<ExcursionList> {
    let horizon = resolution_horizon(p.kappa, p.t, h)?;
    extract_excursions(&reflect(&sample_W(p, horizon, h, seed)?), 5.0 * h)
}
