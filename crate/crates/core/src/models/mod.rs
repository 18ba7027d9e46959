//! The four market models as steppable processes over a common state.
//!
//! Every model advances a [`ProcessState`] one step at a time. The
//! continuous-time models (GBM, Heston, nonlinear Heston) integrate an SDE
//! with an explicit Euler step of size `dt`; the GARCH model is a
//! discrete-time process where one step is one observation interval.
//! Stepping is pure: state in, state out.

mod garch;
mod gbm;
mod heston;
mod nlh;

pub use garch::{garch_fit_from_moments, garch_step, GarchLags, GarchParams};
pub use gbm::{gbm_escape_pf_analytic, gbm_step, GbmParams};
pub use heston::{heston_step, HestonParams};
pub use nlh::{nlh_step, NlhParams};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::rng::RngStream;

/// Common trajectory state: log-price coordinate, instantaneous variance,
/// elapsed time and the GARCH lag buffer when applicable.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessState {
    /// Log-price / return coordinate.
    pub x: f64,
    /// Instantaneous variance, kept non-negative by the stepping schemes.
    pub v: f64,
    /// Elapsed time (continuous models: multiples of dt; GARCH: steps).
    pub t: f64,
    /// GARCH lag buffer; `None` for the continuous models.
    pub aux: Option<GarchLags>,
}

impl ProcessState {
    pub fn new(x: f64, v: f64) -> Self {
        Self {
            x,
            v,
            t: 0.0,
            aux: None,
        }
    }
}

/// Tagged union of per-model parameter records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelParams {
    Gbm(GbmParams),
    Garch(GarchParams),
    Heston(HestonParams),
    Nlh(NlhParams),
}

impl ModelParams {
    pub fn name(&self) -> &'static str {
        match self {
            ModelParams::Gbm(_) => "gbm",
            ModelParams::Garch(_) => "garch",
            ModelParams::Heston(_) => "heston",
            ModelParams::Nlh(_) => "nlh",
        }
    }

    /// Checks every parameter against its domain.
    pub fn validate(&self) -> Result<()> {
        match self {
            ModelParams::Gbm(p) => p.validate(),
            ModelParams::Garch(p) => p.validate(),
            ModelParams::Heston(p) => p.validate(),
            ModelParams::Nlh(p) => p.validate(),
        }
    }

    /// True for models that advance one observation per step rather than
    /// integrating with dt.
    pub fn is_discrete(&self) -> bool {
        matches!(self, ModelParams::Garch(_))
    }

    /// Physical time advanced by one step. Continuous models move by `dt`;
    /// GARCH uses the step-to-time mapping of one time unit per step.
    pub fn time_per_step(&self, dt: f64) -> f64 {
        if self.is_discrete() {
            1.0
        } else {
            dt
        }
    }

    /// Initial state at position `x0` with starting variance `v0`.
    ///
    /// For GARCH, `v0 > 0` seeds the lag buffers; `v0 = 0` falls back to
    /// the unconditional variance (or alpha0 if non-stationary).
    pub fn init_state(&self, x0: f64, v0: f64) -> ProcessState {
        let mut state = ProcessState::new(x0, v0.max(0.0));
        if let ModelParams::Garch(p) = self {
            let seed_var = if v0 > 0.0 {
                v0
            } else {
                p.unconditional_variance().unwrap_or(p.alpha0)
            };
            state.v = seed_var;
            state.aux = Some(GarchLags::filled(p, seed_var));
        }
        state
    }

    /// Advances the state by one step, drawing noise from `stream`.
    #[inline]
    pub fn step(&self, state: ProcessState, stream: &mut RngStream, dt: f64) -> ProcessState {
        match self {
            ModelParams::Gbm(p) => gbm_step(state, p, stream, dt),
            ModelParams::Garch(p) => garch_step(state, p, stream),
            ModelParams::Heston(p) => heston_step(state, p, stream, dt),
            ModelParams::Nlh(p) => nlh_step(state, p, stream, dt),
        }
    }
}

/// Simulates a free-running return series of `n_obs` observations.
///
/// Continuous models report the per-step increment of x; GARCH reports the
/// return x_t itself, after discarding a warm-up of `10 τ` steps. The
/// Heston-type models start from the stationary level `v0 = b`.
pub fn simulate_returns(
    params: &ModelParams,
    n_obs: usize,
    stream: &mut RngStream,
    dt: f64,
) -> Vec<f64> {
    let v0 = match params {
        ModelParams::Heston(p) => p.b,
        ModelParams::Nlh(p) => p.b,
        _ => 0.0,
    };
    let mut state = params.init_state(0.0, v0);
    if let ModelParams::Garch(p) = params {
        let warmup = p.warmup_steps();
        for _ in 0..warmup {
            state = params.step(state, stream, dt);
        }
    }
    let mut out = Vec::with_capacity(n_obs);
    let mut prev_x = state.x;
    for _ in 0..n_obs {
        state = params.step(state, stream, dt);
        if params.is_discrete() {
            out.push(state.x);
        } else {
            out.push(state.x - prev_x);
            prev_x = state.x;
        }
    }
    out
}
