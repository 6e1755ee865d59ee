//! Bessel functions of real order: `J_ν` on the positive axis and `I_ν` on the
//! closed right half-plane, evaluated through their integral representations.

mod bessel_i;
mod bessel_j;
pub mod dd;
mod gamma;

use num_complex::Complex64;
use serde::Serialize;

pub use bessel_i::{bessel_i, bessel_i_eval, bessel_i_series, bessel_i_split};
pub use bessel_j::{
    bessel_j, bessel_j_asymptotic, bessel_j_eval, bessel_j_poisson, bessel_j_series,
    bessel_j_split, small_argument_bound,
};
pub use gamma::{gamma, ln_gamma};

/// Which representation produced a Bessel value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BesselMethod {
    Series,
    PoissonIntegral,
    MbesselSplit,
    Asymptotic,
}

/// A Bessel evaluation together with its provenance.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BesselEval {
    pub order: f64,
    pub argument: Complex64,
    pub value: Complex64,
    /// When set, `value` is `e^{-Re z} I_ν(z)`.
    pub scaled: bool,
    pub method: BesselMethod,
}
