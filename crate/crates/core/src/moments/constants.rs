//! Exact constants of the connection and moment bounds.
//!
//! `C_n` follows `C_{n+1} = 2·n!·Σ_{l=1}^{n-1} C_{l+1}·C_{n-l+1} + n·C_n` from
//! `C_2 = 1`, and `D_n = Σ_{π ∈ Π_n} C_{|π|} = Σ_p S(n, p)·C_p` with Stirling
//! numbers of the second kind `S(n, p)`. `C_1` is a convention (default 1);
//! note that the recursion at `n = 1` also returns `C_2 = C_1`.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{invalid, Result};

/// `C_n` and `D_n` for `1 ≤ n ≤ n_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstantsTable {
    c: Vec<BigUint>,
    d: Vec<BigUint>,
}

/// `S(n, p)` for `0 ≤ p ≤ n ≤ n_max`, row-major by `n`.
pub fn stirling2_table(n_max: usize) -> Vec<Vec<BigUint>> {
    let mut rows: Vec<Vec<BigUint>> = vec![vec![BigUint::one()]];
    for n in 1..=n_max {
        let prev = &rows[n - 1];
        let mut row = vec![BigUint::zero(); n + 1];
        for (p, slot) in row.iter_mut().enumerate().skip(1) {
            let keep = prev.get(p).map(|s| s * p).unwrap_or_default();
            *slot = keep + &prev[p - 1];
        }
        rows.push(row);
    }
    rows
}

impl ConstantsTable {
    /// Table with the default convention `C_1 = 1`.
    pub fn new(n_max: usize) -> Result<Self> {
        Self::with_c1(n_max, BigUint::one())
    }

    pub fn with_c1(n_max: usize, c1: BigUint) -> Result<Self> {
        if n_max < 2 {
            return Err(invalid!("n_max must be at least 2, got {n_max}"));
        }
        // c[n] holds C_n; index 0 unused
        let mut c = vec![BigUint::zero(), c1, BigUint::one()];
        let mut factorial = BigUint::one();
        for n in 2..n_max {
            factorial *= n;
            let conv: BigUint = (1..n).map(|l| &c[l + 1] * &c[n - l + 1]).sum();
            let next = (conv * &factorial * 2u32) + &c[n] * n;
            c.push(next);
        }
        let stirling = stirling2_table(n_max);
        let d = (0..=n_max)
            .map(|n| {
                if n == 0 {
                    BigUint::zero()
                } else {
                    (1..=n).map(|p| &stirling[n][p] * &c[p]).sum()
                }
            })
            .collect();
        Ok(ConstantsTable { c, d })
    }

    pub fn n_max(&self) -> usize {
        self.c.len() - 1
    }

    pub fn c(&self, n: usize) -> Option<&BigUint> {
        self.c.get(n).filter(|_| n >= 1)
    }

    pub fn d(&self, n: usize) -> Option<&BigUint> {
        self.d.get(n).filter(|_| n >= 1)
    }

    /// `C_n` as a float, for bound evaluation.
    pub fn c_f64(&self, n: usize) -> Result<f64> {
        self.c(n)
            .and_then(|v| v.to_f64())
            .ok_or_else(|| invalid!("C_{n} is not in the table"))
    }

    pub fn d_f64(&self, n: usize) -> Result<f64> {
        self.d(n)
            .and_then(|v| v.to_f64())
            .ok_or_else(|| invalid!("D_{n} is not in the table"))
    }
}
