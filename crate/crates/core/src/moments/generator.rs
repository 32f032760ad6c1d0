//! The coalescent generator `Γg(x) = Σ_{i<j} x_i x_j (g(x^{i,j}) − g(x))`
//! evaluated by the pair sum and by closed forms in power sums.

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{invalid, Result};
use crate::mass::power_sum;

/// Functionals with closed-form generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    /// `s_k`.
    PowerSum(u32),
    /// `s_2^n · s_m`.
    PowerSumProduct { n: u32, m: u32 },
}

impl Observable {
    pub fn validate(self) -> Result<Self> {
        match self {
            Observable::PowerSum(0) => Err(invalid!("power sums need k >= 1")),
            Observable::PowerSumProduct { m: 0, .. } => Err(invalid!("power sums need m >= 1")),
            _ => Ok(self),
        }
    }

    pub fn eval(self, x: &[f64]) -> f64 {
        match self {
            Observable::PowerSum(k) => power_sum(x, k),
            Observable::PowerSumProduct { n, m } => {
                power_sum(x, 2).powi(n as i32) * power_sum(x, m)
            }
        }
    }
}

/// `Γg(x)` by the pair sum, building every merged state `x^{i,j}`.
pub fn generator_direct(x: &[f64], g: Observable) -> Result<f64> {
    let g = g.validate()?;
    let base = g.eval(x);
    let mut merged: Vec<f64> = Vec::with_capacity(x.len());
    let mut total = 0.0;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            merged.clear();
            merged.extend(
                x.iter()
                    .enumerate()
                    .filter(|&(k, _)| k != i && k != j)
                    .map(|(_, &v)| v),
            );
            merged.push(x[i] + x[j]);
            total += x[i] * x[j] * (g.eval(&merged) - base);
        }
    }
    Ok(total)
}

fn binom(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Power sums `s_0, …, s_max` of `x`.
fn power_sums(x: &[f64], max: u32) -> Vec<f64> {
    (0..=max)
        .map(|k| {
            if k == 0 {
                x.len() as f64
            } else {
                power_sum(x, k)
            }
        })
        .collect()
}

/// `Γ s_{2k+1} = Σ_{l=1}^{k} C(2k+1, l)·s_{l+1}·s_{2k−l+2} − (2^{2k+1} − 2)/2 · s_{2k+3}`.
pub fn generator_closed_odd(x: &[f64], k: u32) -> Result<f64> {
    if k == 0 {
        return Err(invalid!("odd closed form needs k >= 1"));
    }
    let s = power_sums(x, 2 * k + 3);
    let m = 2 * k + 1;
    let pairs: f64 = (1..=k)
        .map(|l| binom(m, l) * s[(l + 1) as usize] * s[(m - l + 1) as usize])
        .sum();
    Ok(pairs - 0.5 * (2f64.powi(m as i32) - 2.0) * s[(m + 2) as usize])
}

/// `Γ(s_2^n s_m)` as the sum of three parts: the change of `s_m` alone, of
/// `s_2^n` alone, and the cross term.
pub fn generator_closed_product(x: &[f64], n: u32, m: u32) -> Result<f64> {
    if n == 0 {
        return Err(invalid!("product closed form needs n >= 1"));
    }
    if m < 2 {
        return Err(invalid!("product closed form needs m >= 2"));
    }
    let s = power_sums(x, 2 * n + m + 2);
    let s = |i: u32| s[i as usize];
    let half = (m - 1) / 2;
    let even = m.is_multiple_of(2);

    // Σ_{i<j} x_i^{p+1} x_j^{p+1} (x_i + x_j)^m − … for shift p, symmetrised
    let merge_sum = |p: u32, scale_pairs: f64, scale_middle: f64| -> f64 {
        let mut acc: f64 = (1..=half)
            .map(|l| binom(m, l) * (s(p + l + 1) * s(p + m - l + 1) - s(2 * p + m + 2)))
            .sum();
        acc *= scale_pairs;
        if even {
            let mid = p + m / 2 + 1;
            acc += scale_middle * binom(m, m / 2) * (s(mid) * s(mid) - s(2 * p + m + 2));
        }
        acc
    };

    let s2n = s(2).powi(n as i32);
    let a = s2n * merge_sum(0, 1.0, 0.5);
    let mut b = 0.0;
    let mut c = 0.0;
    for k in 0..n {
        let p = n - k;
        let w = binom(n, k) * s(2).powi(k as i32);
        b += w * 2f64.powi(p as i32 - 1) * (s(p + 1) * s(p + 1) - s(2 * p + 2));
        c += w * merge_sum(p, 2f64.powi(p as i32), 2f64.powi(p as i32 - 1));
    }
    Ok(a + s(m) * b + c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
    }

    #[test]
    fn direct_examples() {
        assert_eq!(
            generator_direct(&[1.0, 1.0], Observable::PowerSum(2)).unwrap(),
            2.0
        );
        let (a, b) = (0.7, 0.3);
        let v = generator_direct(&[a, b], Observable::PowerSum(2)).unwrap();
        assert!((v - 2.0 * a * a * b * b).abs() < 1e-15);
        assert_eq!(
            generator_direct(&[1.0, 1.0], Observable::PowerSum(3)).unwrap(),
            6.0
        );
        assert_eq!(
            generator_direct(&[1.0, 1.0], Observable::PowerSumProduct { n: 1, m: 2 }).unwrap(),
            12.0
        );
        for g in [
            Observable::PowerSum(4),
            Observable::PowerSumProduct { n: 2, m: 3 },
        ] {
            assert_eq!(generator_direct(&[0.8], g).unwrap(), 0.0);
        }
        assert!(generator_direct(&[1.0], Observable::PowerSum(0)).is_err());
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(generator_closed_odd(&[1.0, 1.0], 1).unwrap(), 6.0);
        assert_eq!(generator_closed_odd(&[1.0], 1).unwrap(), 0.0);
        assert_eq!(generator_closed_product(&[1.0, 1.0], 1, 2).unwrap(), 12.0);
        assert_eq!(generator_closed_product(&[1.0], 2, 4).unwrap(), 0.0);
        assert!(generator_closed_odd(&[1.0], 0).is_err());
        assert!(generator_closed_product(&[1.0], 0, 2).is_err());
        assert!(generator_closed_product(&[1.0], 1, 1).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn odd_closed_form_matches_pair_sum(x in proptest::collection::vec(0.001f64..=1.0, 1..=10), k in 1u32..=3) {
            let direct = generator_direct(&x, Observable::PowerSum(2 * k + 1)).unwrap();
            let closed = generator_closed_odd(&x, k).unwrap();
            prop_assert!(x.len() == 1 || rel_close(direct, closed, 1e-10), "{direct} vs {closed}");
        }

        #[test]
        fn product_closed_form_matches_pair_sum(x in proptest::collection::vec(0.001f64..=1.0, 1..=8),
                                                n in 1u32..=2, m in 2u32..=4) {
            let direct = generator_direct(&x, Observable::PowerSumProduct { n, m }).unwrap();
            let closed = generator_closed_product(&x, n, m).unwrap();
            prop_assert!(x.len() == 1 || rel_close(direct, closed, 1e-10), "{direct} vs {closed}");
        }
    }
}
