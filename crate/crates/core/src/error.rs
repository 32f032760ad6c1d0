use alloc::string::String;

use thiserror::Error;

/// Errors raised by the samplers, oracles and bound evaluators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The bound being evaluated requires `t * |x|^2 < 1`.
    #[error("outside the subcritical window: {0}")]
    Domain(String),

    #[error("exact enumeration supports at most {cap} vertices, got {vertices}")]
    Capacity { vertices: usize, cap: usize },
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! invalid {
    ($($arg:tt)*) => {
        $crate::error::Error::InvalidInput(alloc::format!($($arg)*))
    };
}

macro_rules! domain {
    ($($arg:tt)*) => {
        $crate::error::Error::Domain(alloc::format!($($arg)*))
    };
}

pub(crate) use domain;
pub(crate) use invalid;
