//! Heston stochastic-volatility model.
//!
//! ```text
//! dx = (mu - v/2) dt + sqrt(v) dW1
//! dv = a (b - v) dt + c sqrt(v) dWc
//! dWc = rho dW1 + sqrt(1 - rho²) dW2
//! ```
//!
//! The variance follows the CIR mean-reverting process with long-term
//! level `b`, reversion rate `a` and volatility-of-volatility `c`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::ProcessState;
use crate::rng::{cir_step, correlate, draw_wiener_pair, RngStream};

/// Heston model parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HestonParams {
    /// Market trend.
    pub mu: f64,
    /// Mean-reversion rate (1/time).
    pub a: f64,
    /// Long-term variance.
    pub b: f64,
    /// Volatility of volatility.
    pub c: f64,
    /// Correlation between the price and variance noises.
    pub rho: f64,
}

impl HestonParams {
    pub fn validate(&self) -> Result<()> {
        if !self.mu.is_finite() {
            return Err(Error::invalid("mu", "must be finite", self.mu));
        }
        validate_cir("a", self.a)?;
        validate_cir("b", self.b)?;
        validate_cir("c", self.c)?;
        validate_rho(self.rho)
    }
}

pub(crate) fn validate_cir(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() || value < 0.0 {
        return Err(Error::invalid(name, "must be >= 0", value));
    }
    Ok(())
}

pub(crate) fn validate_rho(rho: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&rho) || !rho.is_finite() {
        return Err(Error::invalid("rho", "must lie in [-1, 1]", rho));
    }
    Ok(())
}

/// One Euler step of the Heston pair (x, v), full truncation on v.
#[inline]
pub fn heston_step(
    mut state: ProcessState,
    p: &HestonParams,
    stream: &mut RngStream,
    dt: f64,
) -> ProcessState {
    let pair = draw_wiener_pair(stream, dt);
    let dwc = correlate(pair, p.rho);
    let v = state.v.max(0.0);
    state.x += (p.mu - 0.5 * v) * dt + v.sqrt() * pair.dw1;
    state.v = cir_step(v, p.a, p.b, p.c, dwc, dt);
    state.t += dt;
    state
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frozen_state_stays_frozen() {
        let p = HestonParams {
            mu: 0.0,
            a: 1.0,
            b: 0.0,
            c: 0.0,
            rho: 0.0,
        };
        let mut stream = RngStream::new(31, 0);
        let st = heston_step(ProcessState::new(1.0, 0.0), &p, &mut stream, 0.01);
        assert_eq!(st.x, 1.0);
        assert_eq!(st.v, 0.0);
    }

    #[test]
    fn constant_volatility_reduction() {
        // c = 0, v0 = b: the variance never leaves b, bit-exact.
        let p = HestonParams {
            mu: 0.0,
            a: 2.0,
            b: 0.04,
            c: 0.0,
            rho: 0.0,
        };
        let mut stream = RngStream::new(32, 0);
        let mut st = ProcessState::new(0.0, 0.04);
        for _ in 0..1000 {
            st = heston_step(st, &p, &mut stream, 0.01);
            assert_eq!(st.v, 0.04);
        }
    }

    #[test]
    fn ito_term_sets_the_mean_drift() {
        // mu = 0, v held at 0.04: mean drift of x per unit time → -0.02
        let p = HestonParams {
            mu: 0.0,
            a: 1e6, // pins v to b between steps
            b: 0.04,
            c: 0.0,
            rho: 0.0,
        };
        let dt = 0.01;
        let n_paths = 40_000u64;
        let steps = 100; // T = 1
        let mut sum = 0.0;
        for i in 0..n_paths {
            let mut stream = RngStream::new(33, i);
            let mut st = ProcessState::new(0.0, 0.04);
            for _ in 0..steps {
                st = heston_step(st, &p, &mut stream, dt);
            }
            sum += st.x;
        }
        let mean = sum / n_paths as f64;
        let se = 0.2 / (n_paths as f64).sqrt();
        assert!((mean + 0.02).abs() < 3.0 * se, "mean drift {mean}");
    }

    #[test]
    fn increment_correlation_tracks_rho() {
        // corr of the noise parts of dx and dv → rho ± 0.02 over 1e6 steps
        let p = HestonParams {
            mu: 0.0,
            a: 1.0,
            b: 0.04,
            c: 0.3,
            rho: 0.5,
        };
        let dt = 0.01;
        let n = 1_000_000;
        let mut stream = RngStream::new(34, 0);
        let mut st = ProcessState::new(0.0, p.b);
        let mut dx = Vec::with_capacity(n);
        let mut dv = Vec::with_capacity(n);
        for _ in 0..n {
            let x0 = st.x;
            let v0 = st.v;
            st = heston_step(st, &p, &mut stream, dt);
            // subtract the deterministic drifts to isolate the noise parts
            dx.push(st.x - x0 - (p.mu - 0.5 * v0) * dt);
            dv.push(st.v - v0 - p.a * (p.b - v0) * dt);
        }
        let corr = {
            let n = dx.len() as f64;
            let mx = dx.iter().sum::<f64>() / n;
            let my = dv.iter().sum::<f64>() / n;
            let mut cov = 0.0;
            let mut vx = 0.0;
            let mut vy = 0.0;
            for (a, b) in dx.iter().zip(&dv) {
                cov += (a - mx) * (b - my);
                vx += (a - mx) * (a - mx);
                vy += (b - my) * (b - my);
            }
            cov / (vx * vy).sqrt()
        };
        assert!((corr - 0.5).abs() < 0.02, "corr = {corr}");
    }

    #[test]
    fn rho_bound_is_validated() {
        let p = HestonParams {
            mu: 0.0,
            a: 1.0,
            b: 0.04,
            c: 0.3,
            rho: -1.01,
        };
        assert!(matches!(
            p.validate(),
            Err(Error::InvalidParameter { name: "rho", .. })
        ));
    }
}
