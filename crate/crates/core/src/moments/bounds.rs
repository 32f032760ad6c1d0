//! Closed-form upper bounds valid in the subcritical window `t‖x‖² < 1`.

#![allow(non_snake_case)]

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::constants::ConstantsTable;
use crate::error::{domain, invalid, Result};
use crate::mass::MassVector;

/// `1 − t‖x‖²`, or a domain error outside the window.
pub fn subcritical_gap(x: &MassVector, t: f64) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(invalid!("t must be finite and >= 0, got {t}"));
    }
    let gap = 1.0 - t * x.s2();
    if gap <= 0.0 {
        return Err(domain!("t·|x|² = {} must be < 1", t * x.s2()));
    }
    Ok(gap)
}

/// Factor `t / (1 − t‖x‖²)`; the pair bound is `x_i x_j` times this.
pub fn bound_connect(x: &MassVector, t: f64) -> Result<f64> {
    Ok(t / subcritical_gap(x, t)?)
}

/// `C_n · Π x_i · t^{n/2} / (1 − t‖x‖²)^{2n−3}` for `n = |targets| ≥ 2`
/// distinct targets.
pub fn bound_npoint(
    x: &MassVector,
    t: f64,
    targets: &[usize],
    table: &ConstantsTable,
) -> Result<f64> {
    let n = targets.len();
    if n < 2 {
        return Err(invalid!("n-point bound needs at least 2 targets, got {n}"));
    }
    for (k, &i) in targets.iter().enumerate() {
        if i >= x.len() {
            return Err(invalid!(
                "target index {i} out of range for {} blocks",
                x.len()
            ));
        }
        if targets[..k].contains(&i) {
            return Err(invalid!("target {i} listed twice"));
        }
    }
    let gap = subcritical_gap(x, t)?;
    let product: f64 = targets.iter().map(|&i| x[i]).product();
    Ok(table.c_f64(n)? * product * t.powf(n as f64 / 2.0) / gap.powi(2 * n as i32 - 3))
}

/// `D_n ‖x‖^n / (1 − t‖x‖²)^{2n−3}`, bounding `E S_n(t)` for `n ≥ 2`.
pub fn bound_Sn(x: &MassVector, t: f64, n: u32, table: &ConstantsTable) -> Result<f64> {
    if n < 2 {
        return Err(invalid!("moment bound needs n >= 2, got {n}"));
    }
    let gap = subcritical_gap(x, t)?;
    Ok(table.d_f64(n as usize)? * x.norm().powi(n as i32) / gap.powi(2 * n as i32 - 3))
}

/// `s_1(x)^m · D_n ‖x‖^n / (1 − t‖x‖²)^{2n−3}`, bounding `E[S_n(t) S_m(t)]`
/// through `S_m ≤ S_1^m` and the conservation of `S_1`.
pub fn bound_joint(x: &MassVector, t: f64, n: u32, m: u32, table: &ConstantsTable) -> Result<f64> {
    if m < 1 {
        return Err(invalid!("joint bound needs m >= 1"));
    }
    Ok(x.s1().powi(m as i32) * bound_Sn(x, t, n, table)?)
}

/// `D_2 / (−t)` with `D_2` from the table.
pub fn bound_negative_time(t: f64, table: &ConstantsTable) -> Result<f64> {
    bound_negative_time_with(t, table.d_f64(2)?)
}

/// `d2 / (−t)` for a caller-chosen `D_2`.
pub fn bound_negative_time_with(t: f64, d2: f64) -> Result<f64> {
    if !(t < 0.0) {
        return Err(domain!("negative-time bound needs t < 0, got {t}"));
    }
    Ok(d2 / -t)
}
