//! Small statistics toolkit shared by the estimators: sample mean with
//! standard error, the two-sample Kolmogorov–Smirnov test and chi-squared
//! statistics (p-values for the latter live in the `mclab` crate).

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{invalid, Result};

/// Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateWithCI {
    pub mean: f64,
    pub std_error: f64,
    pub reps: usize,
}

impl EstimateWithCI {
    /// An exactly known value.
    pub fn exact(value: f64) -> Self {
        EstimateWithCI {
            mean: value,
            std_error: 0.0,
            reps: 1,
        }
    }

    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        let mut acc = Welford::default();
        samples.iter().for_each(|&v| acc.push(v));
        acc.finish()
    }

    /// `mean ± z·SE`.
    pub fn interval(&self, z: f64) -> (f64, f64) {
        (
            self.mean - z * self.std_error,
            self.mean + z * self.std_error,
        )
    }

    /// Whether `value` lies within `z` standard errors of the mean.
    pub fn covers(&self, value: f64, z: f64) -> bool {
        (self.mean - value).abs() <= z * self.std_error
    }

    /// Whether two independent estimates agree within `z` times the sum of their SEs.
    pub fn agrees_with(&self, other: &EstimateWithCI, z: f64) -> bool {
        (self.mean - other.mean).abs() <= z * (self.std_error + other.std_error)
    }
}

/// Streaming mean/variance accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Welford {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn push(&mut self, v: f64) {
        self.n += 1;
        let delta = v - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (v - self.mean);
    }

    pub fn count(&self) -> usize {
        self.n
    }

    pub fn finish(&self) -> Result<EstimateWithCI> {
        if self.n == 0 {
            return Err(invalid!("cannot estimate from zero samples"));
        }
        let std_error = if self.n > 1 {
            (self.m2.max(0.0) / (self.n - 1) as f64 / self.n as f64).sqrt()
        } else {
            0.0
        };
        Ok(EstimateWithCI {
            mean: self.mean,
            std_error,
            reps: self.n,
        })
    }
}

/// Result of a two-sample Kolmogorov–Smirnov test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// `sup_z |F_a(z) - F_b(z)|` for two samples.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> Result<f64> {
    Ok(ecdf_differences(a, b)?
        .into_iter()
        .fold(0.0, |acc, d| acc.max(d.abs())))
}

/// `sup_z (F_a(z) - F_b(z))`, the one-sided statistic.
pub fn ks_statistic_one_sided(a: &[f64], b: &[f64]) -> Result<f64> {
    Ok(ecdf_differences(a, b)?.into_iter().fold(0.0, f64::max))
}

/// `F_a - F_b` evaluated right after every jump of the pooled sample.
fn ecdf_differences(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    if a.is_empty() || b.is_empty() {
        return Err(invalid!("KS test needs two non-empty samples"));
    }
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return Err(invalid!("KS test samples contain NaN"));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable_by(f64::total_cmp);
    b.sort_unstable_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(a.len() + b.len());
    while i < a.len() || j < b.len() {
        let z = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        while i < a.len() && a[i] <= z {
            i += 1;
        }
        while j < b.len() && b[j] <= z {
            j += 1;
        }
        out.push(i as f64 / na - j as f64 / nb);
    }
    Ok(out)
}

/// Survival function of the Kolmogorov distribution, `P(K > lambda)`.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 0.2 {
        // the alternating series converges slowly here and the value is 1 to double precision
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Two-sample KS test with the asymptotic p-value (Stephens' small-sample correction).
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    let statistic = ks_statistic(a, b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let ne = (na * nb / (na + nb)).sqrt();
    let lambda = (ne + 0.12 + 0.11 / ne) * statistic;
    Ok(KsResult {
        statistic,
        p_value: kolmogorov_survival(lambda),
    })
}

/// Critical value of the one-sided two-sample KS statistic at level `alpha`.
pub fn ks_one_sided_critical(na: usize, nb: usize, alpha: f64) -> f64 {
    let (na, nb) = (na as f64, nb as f64);
    (-(alpha.ln()) / 2.0 * (na + nb) / (na * nb)).sqrt()
}

/// Pearson goodness-of-fit statistic of `observed` counts against
/// `expected_probs`. Cells with expected count below `min_expected` are pooled
/// into one cell. Returns `(statistic, degrees_of_freedom)`.
pub fn chi_squared_gof(
    observed: &[u64],
    expected_probs: &[f64],
    min_expected: f64,
) -> Result<(f64, usize)> {
    if observed.len() != expected_probs.len() {
        return Err(invalid!(
            "observed and expected cell counts differ in length"
        ));
    }
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return Err(invalid!("chi-squared test needs at least one observation"));
    }
    let n = total as f64;
    let (mut stat, mut cells) = (0.0, 0usize);
    let (mut pooled_obs, mut pooled_exp) = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(expected_probs) {
        let e = p * n;
        if e < min_expected {
            pooled_obs += o as f64;
            pooled_exp += e;
        } else {
            stat += (o as f64 - e) * (o as f64 - e) / e;
            cells += 1;
        }
    }
    if pooled_exp > 0.0 {
        stat += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
        cells += 1;
    } else if pooled_obs > 0.0 {
        return Err(invalid!("observed counts in cells of zero probability"));
    }
    if cells < 2 {
        return Err(invalid!("chi-squared test needs at least two cells"));
    }
    Ok((stat, cells - 1))
}

/// Chi-squared homogeneity statistic for two samples over the same cells.
/// Cells empty in both samples are dropped. Returns `(statistic, dof)`.
pub fn chi_squared_two_sample(a: &[u64], b: &[u64]) -> Result<(f64, usize)> {
    if a.len() != b.len() {
        return Err(invalid!("count vectors differ in length"));
    }
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    if na == 0.0 || nb == 0.0 {
        return Err(invalid!("both samples must be non-empty"));
    }
    let n = na + nb;
    let (mut stat, mut cells) = (0.0, 0usize);
    for (&x, &y) in a.iter().zip(b) {
        let col = (x + y) as f64;
        if col == 0.0 {
            continue;
        }
        let (ea, eb) = (na * col / n, nb * col / n);
        stat += (x as f64 - ea).powi(2) / ea + (y as f64 - eb).powi(2) / eb;
        cells += 1;
    }
    if cells < 2 {
        return Err(invalid!(
            "chi-squared test needs at least two non-empty cells"
        ));
    }
    Ok((stat, cells - 1))
}
