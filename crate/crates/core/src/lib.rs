// `!(x > 0.0)` is used on purpose so that NaN is rejected with the bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod angular;
pub mod cli;
pub mod error;
pub mod estimates;
pub mod hankel;
pub mod propagator;
pub mod quadrature;
mod serde_util;
pub mod special;

pub use error::{LabError, Result};
