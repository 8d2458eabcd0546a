use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Wavenumber of the incident wave, in units of `1/a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveContext {
    k: f64,
}

impl WaveContext {
    pub fn new(k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::arg(format!("wavenumber must be positive, got {k}")));
        }
        Ok(Self { k })
    }

    /// `k = n π / a`, the parameterization used for resonant slabs.
    pub fn from_pi_multiple(n: f64) -> Result<Self> {
        Self::new(n * PI)
    }

    #[inline]
    pub fn k(&self) -> f64 {
        self.k
    }
}

/// Longitudinal wavenumber `ω(p) = sqrt(k² - p²)` of a propagating channel.
pub fn omega(p: f64, ctx: &WaveContext) -> Result<f64> {
    let k = ctx.k;
    if !p.is_finite() || p.abs() > k {
        return Err(Error::Domain { p, k });
    }
    // (k - p)(k + p) keeps relative accuracy near the endpoints.
    Ok(((k - p.abs()) * (k + p.abs())).sqrt())
}

/// `(p₊, p₋) = (k + ω(p), k - ω(p))`.
pub fn p_plus_minus(p: f64, ctx: &WaveContext) -> Result<(f64, f64)> {
    let w = omega(p, ctx)?;
    let k = ctx.k;
    // p₋ = p² / p₊ avoids cancellation when ω ≈ k.
    let plus = k + w;
    Ok((plus, p * p / plus))
}
