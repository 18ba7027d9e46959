//! Random-number and integration substrate.
//!
//! All models draw their noise through [`RngStream`], a counter-based
//! generator addressed by `(seed, stream_id)`. Identical addresses replay
//! identical increment sequences; distinct stream ids give statistically
//! independent lanes, so Monte Carlo events can be farmed out to workers
//! in any order without changing results.
//!
//! The Wiener increments follow the usual convention
//! `<dW_i> = 0`, `<dW_i dW_j> = dt δ_ij`, and two lanes are mixed into a
//! correlated increment by
//!
//! ```text
//! dWc = ρ dW1 + sqrt(1 - ρ²) dW2
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reproducible random stream addressed by `(seed, stream_id)`.
///
/// Backed by ChaCha8, which exposes 2^64 independent streams per seed and
/// lets every escape event own a private lane derived from its index.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// One standard normal draw, advancing the stream.
    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// One Wiener increment ~ Normal(0, dt), advancing the stream.
    #[inline]
    pub fn wiener(&mut self, dt: f64) -> f64 {
        debug_assert!(dt > 0.0);
        self.standard_normal() * dt.sqrt()
    }

    /// One uniform draw in [0, 1), advancing the stream.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.rng.random()
    }
}

/// Pair of independent Wiener increments over one step, each ~ Normal(0, dt).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WienerPair {
    pub dw1: f64,
    pub dw2: f64,
}

/// Time-stepping contract shared by the continuous-time models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepConfig {
    /// Time step in dimensionless time units.
    pub dt: f64,
    /// Censoring horizon in steps.
    pub max_steps: u64,
}

impl Default for StepConfig {
    fn default() -> Self {
        Self {
            dt: 0.01,
            max_steps: 10_000_000,
        }
    }
}

impl StepConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.dt.is_finite() || self.dt <= 0.0 {
            return Err(Error::invalid("dt", "must be finite and > 0", self.dt));
        }
        if self.max_steps < 1 {
            return Err(Error::invalid("max_steps", "must be >= 1", 0.0));
        }
        Ok(())
    }
}

/// Draws two independent Normal(0, dt) increments, advancing the stream.
#[inline]
pub fn draw_wiener_pair(stream: &mut RngStream, dt: f64) -> WienerPair {
    debug_assert!(dt > 0.0, "dt must be positive (rejected at validation)");
    let s = dt.sqrt();
    WienerPair {
        dw1: stream.standard_normal() * s,
        dw2: stream.standard_normal() * s,
    }
}

/// Mixes a Wiener pair into a correlated increment
/// `dWc = ρ dW1 + sqrt(1-ρ²) dW2`.
///
/// `corr(dW1, dWc) = ρ` and `Var(dWc) = dt` for any ρ in [-1, 1].
#[inline]
pub fn correlate(pair: WienerPair, rho: f64) -> f64 {
    assert!(
        (-1.0..=1.0).contains(&rho),
        "rho must lie in [-1, 1], got {rho}"
    );
    rho * pair.dw1 + (1.0 - rho * rho).sqrt() * pair.dw2
}

/// One full-truncation Euler step of the CIR variance process
/// `dv = a (b - v) dt + c sqrt(v) dWc`.
///
/// The square root is evaluated at `max(v, 0)` and the result is clamped
/// at zero, so the returned variance is never negative.
#[inline]
pub fn cir_step(v: f64, a: f64, b: f64, c: f64, dwc: f64, dt: f64) -> f64 {
    debug_assert!(v >= 0.0);
    debug_assert!(a >= 0.0 && b >= 0.0 && c >= 0.0);
    let v_pos = v.max(0.0);
    (v + a * (b - v_pos) * dt + c * v_pos.sqrt() * dwc).max(0.0)
}
