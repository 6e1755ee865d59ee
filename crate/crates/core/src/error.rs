use thiserror::Error;

/// Errors raised anywhere in the spectrum → propagator → scan pipeline.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported Bessel order {0} (orders must be non-negative)")]
    UnsupportedOrder(f64),

    #[error("input potential error: {0}")]
    Potential(String),

    #[error(
        "P not strictly positive: smallest eigenvalue mu_0 = {mu0:.6e} gives mu_0 + (n-2)^2/4 = {shifted:.6e} <= 0"
    )]
    NotPositive { mu0: f64, shifted: f64 },

    #[error("scenario error: {0}")]
    Scenario(String),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;
