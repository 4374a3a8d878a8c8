use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Logarithmic scaling of window errors for the estimator network.
///
/// `ε = (log10 e − μ)/ε_r` with `μ = (ε₊ + ε₋)/2` and `ε_r = (ε₊ − ε₋)/2`, so
/// errors between `10^ε₋` and `10^ε₊` land in `[−1, 1]`. Errors below the
/// lower bound, including zero, are clamped to `−1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorMap {
    pub eps_hi: f64,
    pub eps_lo: f64,
}

impl Default for ErrorMap {
    fn default() -> Self {
        ErrorMap { eps_hi: -1.5, eps_lo: -4.5 }
    }
}

impl ErrorMap {
    pub fn new(eps_lo: f64, eps_hi: f64) -> Result<Self> {
        if !(eps_hi > eps_lo && eps_lo.is_finite() && eps_hi.is_finite()) {
            return Err(Error::config("estimator", format!("need eps_lo < eps_hi, got {eps_lo} and {eps_hi}")));
        }
        Ok(ErrorMap { eps_hi, eps_lo })
    }

    pub fn range(&self) -> f64 {
        0.5 * (self.eps_hi - self.eps_lo)
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.eps_hi + self.eps_lo)
    }

    /// Returns the encoded value and whether it was clamped to the floor.
    pub fn encode(&self, e: f64) -> (f64, bool) {
        if !(e > 0.0) || e.log10() < self.eps_lo {
            return (-1.0, true);
        }
        ((e.log10() - self.midpoint()) / self.range(), false)
    }

    pub fn decode(&self, eps: f64) -> f64 {
        10f64.powf(eps * self.range() + self.midpoint())
    }
}
