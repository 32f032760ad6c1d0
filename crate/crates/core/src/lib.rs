//! Multiplicative coalescent laboratory core.
//!
//! Samplers for the coalescent state (random-graph construction and
//! exponential-clock dynamics), exact small-instance oracles, reflected
//! Lévy-type excursion paths, the colour-and-collapse operator, exact
//! moment constants and bound evaluators. Everything here is `no_std` with
//! `alloc`; IO and the experiment runner live in the `mclab` crate.

#![no_std]
// `!(v > 0.0)` style checks are used on purpose so that NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
pub mod excursion;
pub mod graphsim;
pub mod mass;
pub mod moments;
pub mod operators;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use mass::{MassVector, ParamTriple};
