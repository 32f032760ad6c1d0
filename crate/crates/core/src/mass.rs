//! Mass configurations and the power-sum functionals `s_k`.
//!
//! A [`MassVector`] is a finite truncation of a non-increasing square-summable
//! sequence. The canonical (sorted) order is enforced at construction, so every
//! other module may rely on `masses()[0]` being the largest block.

use alloc::vec::Vec;
use core::ops::Deref;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{invalid, Result};

/// Finite non-increasing vector of non-negative block masses.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MassVector(Vec<f64>);

impl MassVector {
    /// The empty configuration.
    pub fn empty() -> Self {
        MassVector(Vec::new())
    }

    /// Sorts `masses` non-increasingly. Negative or non-finite entries are rejected.
    pub fn ord(mut masses: Vec<f64>) -> Result<Self> {
        if let Some(bad) = masses.iter().find(|m| !(m.is_finite() && **m >= 0.0)) {
            return Err(invalid!("mass entries must be finite and >= 0, got {bad}"));
        }
        masses.sort_unstable_by(|a, b| b.total_cmp(a));
        // -0.0 sorts below 0.0 under total_cmp; normalize so equal masses compare equal.
        for m in masses.iter_mut() {
            if *m == 0.0 {
                *m = 0.0;
            }
        }
        Ok(MassVector(masses))
    }

    /// `n` copies of `mass`.
    pub fn uniform(n: usize, mass: f64) -> Result<Self> {
        Self::ord(alloc::vec![mass; n])
    }

    pub fn masses(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// `Σ_i x_i^k` for `k >= 1`.
    pub fn s_k(&self, k: u32) -> Result<f64> {
        if k < 1 {
            return Err(invalid!("power sum order must be >= 1, got {k}"));
        }
        Ok(power_sum(&self.0, k))
    }

    /// Total mass `s_1`.
    pub fn s1(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Squared l² norm `s_2`.
    pub fn s2(&self) -> f64 {
        self.0.iter().map(|m| m * m).sum()
    }

    pub fn norm(&self) -> f64 {
        self.s2().sqrt()
    }

    /// Multiset union of both configurations in canonical order.
    pub fn join(&self, other: &MassVector) -> MassVector {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            if a[i] >= b[j] {
                out.push(a[i]);
                i += 1;
            } else {
                out.push(b[j]);
                j += 1;
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        MassVector(out)
    }

    /// Splits each of the first `m` blocks into `pieces` equal blocks.
    pub fn grind(&self, m: usize, pieces: usize) -> Result<MassVector> {
        if m < 1 || m > self.len() {
            return Err(invalid!(
                "grind: m must lie in [1, {}], got {m}",
                self.len()
            ));
        }
        if pieces < 1 {
            return Err(invalid!("grind: number of pieces must be >= 1"));
        }
        let mut out = Vec::with_capacity(m * pieces + self.len() - m);
        for &x in &self.0[..m] {
            let piece = x / pieces as f64;
            out.extend(core::iter::repeat_n(piece, pieces));
        }
        out.extend_from_slice(&self.0[m..]);
        MassVector::ord(out)
    }
}

impl Deref for MassVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for MassVector {
    type Error = crate::Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        MassVector::ord(v)
    }
}

/// `Σ x_i^k` over an arbitrary slice.
pub(crate) fn power_sum(xs: &[f64], k: u32) -> f64 {
    match k {
        1 => xs.iter().sum(),
        2 => xs.iter().map(|x| x * x).sum(),
        _ => xs.iter().map(|x| x.powi(k as i32)).sum(),
    }
}

/// Parameters `(κ, t, c)` of the excursion processes.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamTriple {
    pub kappa: f64,
    pub t: f64,
    pub c: MassVector,
}

impl ParamTriple {
    pub fn new(kappa: f64, t: f64, c: MassVector) -> Result<Self> {
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(invalid!("kappa must be finite and >= 0, got {kappa}"));
        }
        if !t.is_finite() {
            return Err(invalid!("t must be finite, got {t}"));
        }
        Ok(ParamTriple { kappa, t, c })
    }

    /// `t' = 2t/κ`, where the parabolic drift turns negative.
    pub fn t_prime(&self) -> f64 {
        2.0 * self.t / self.kappa
    }
}
