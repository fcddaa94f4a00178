use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rates of the process. The blue (predation) rate is fixed at 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProcessParams {
    lambda: f64,
    alpha: f64,
}

impl ProcessParams {
    pub fn new(lambda: f64, alpha: f64) -> Result<Self> {
        validate_params(lambda, alpha)
    }

    /// Red spreading rate per (red, white) adjacency.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Conversion rate per red site.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

pub fn validate_params(lambda: f64, alpha: f64) -> Result<ProcessParams> {
    if !lambda.is_finite() || !alpha.is_finite() {
        return Err(Error::NonFinite);
    }
    if lambda <= 0.0 {
        return Err(Error::NonPositiveLambda(lambda));
    }
    if alpha < 0.0 {
        return Err(Error::NegativeAlpha(alpha));
    }
    Ok(ProcessParams { lambda, alpha })
}
