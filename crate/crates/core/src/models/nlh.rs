//! Nonlinear Heston model: Heston variance dynamics driving a particle
//! in the cubic potential.
//!
//! ```text
//! dx = -(U'(x) + v/2) dt + sqrt(v) dW1
//! dv = a (b - v) dt + c sqrt(v) dWc
//! dWc = rho dW1 + sqrt(1 - rho²) dW2
//! ```
//!
//! The drift replaces the Heston trend with the negative gradient of
//! `U(x) = 2x³ + 3x²`, so normal market activity is motion around the
//! metastable minimum and a crash is an escape over the barrier.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::models::heston::{validate_cir, validate_rho};
use crate::models::ProcessState;
use crate::potential::CubicPotential;
use crate::rng::{cir_step, correlate, draw_wiener_pair, RngStream};

/// Nonlinear Heston parameters: CIR variance dynamics plus the fixed
/// cubic potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NlhParams {
    /// Mean-reversion rate (1/time).
    pub a: f64,
    /// Long-term variance.
    pub b: f64,
    /// Volatility of volatility.
    pub c: f64,
    /// Correlation between the price and variance noises.
    pub rho: f64,
    #[serde(default, skip)]
    pub potential: CubicPotential,
}

impl NlhParams {
    pub fn new(a: f64, b: f64, c: f64, rho: f64) -> Self {
        Self {
            a,
            b,
            c,
            rho,
            potential: CubicPotential,
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_cir("a", self.a)?;
        validate_cir("b", self.b)?;
        validate_cir("c", self.c)?;
        validate_rho(self.rho)
    }
}

/// One Euler step of the nonlinear Heston pair (x, v).
#[inline]
pub fn nlh_step(
    mut state: ProcessState,
    p: &NlhParams,
    stream: &mut RngStream,
    dt: f64,
) -> ProcessState {
    let pair = draw_wiener_pair(stream, dt);
    let dwc = correlate(pair, p.rho);
    let v = state.v.max(0.0);
    state.x += -(p.potential.gradient(state.x) + 0.5 * v) * dt + v.sqrt() * pair.dw1;
    state.v = cir_step(v, p.a, p.b, p.c, dwc, dt);
    state.t += dt;
    state
}
