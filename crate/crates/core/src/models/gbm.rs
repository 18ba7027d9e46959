//! Geometric Brownian motion in log-price coordinates.
//!
//! ```text
//! dx = (mu - sigma²/2) dt + sigma dW
//! ```
//!
//! With i.i.d. returns the escape-time distribution against a fixed
//! barrier is geometric: `F(n) = (1 - p) p^{n-1}`, where `p` is the
//! probability of staying inside the region at each observation step.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::ProcessState;
use crate::rng::RngStream;

/// Drift and constant volatility of the GBM log-price process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbmParams {
    /// Drift per unit time.
    pub mu: f64,
    /// Constant volatility, >= 0.
    pub sigma: f64,
}

impl GbmParams {
    pub fn validate(&self) -> Result<()> {
        if !self.mu.is_finite() {
            return Err(Error::invalid("mu", "must be finite", self.mu));
        }
        if !self.sigma.is_finite() || self.sigma < 0.0 {
            return Err(Error::invalid("sigma", "must be >= 0", self.sigma));
        }
        Ok(())
    }
}

/// One Euler step of the GBM log-price.
#[inline]
pub fn gbm_step(
    mut state: ProcessState,
    p: &GbmParams,
    stream: &mut RngStream,
    dt: f64,
) -> ProcessState {
    let dw = stream.wiener(dt);
    state.x += (p.mu - 0.5 * p.sigma * p.sigma) * dt + p.sigma * dw;
    state.t += dt;
    state
}

/// Analytic escape-time probability function for i.i.d. returns:
/// `F(n) = (1 - p) p^{n-1}` with `p` the per-step stay probability.
pub fn gbm_escape_pf_analytic(p_inside: f64, n: u64) -> Result<f64> {
    if !(p_inside > 0.0 && p_inside < 1.0) {
        return Err(Error::invalid("p_inside", "must lie in (0, 1)", p_inside));
    }
    if n < 1 {
        return Err(Error::invalid("n", "must be >= 1", n as f64));
    }
    Ok((1.0 - p_inside) * p_inside.powi((n - 1) as i32))
}
