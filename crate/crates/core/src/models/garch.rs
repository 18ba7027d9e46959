//! GARCH(p,q) returns process.
//!
//! ```text
//! sigma²_t = alpha0 + sum_i alpha_i x²_{t-i} + sum_j beta_j sigma²_{t-j}
//! x_t      = eta_t sigma_t,   eta_t ~ Normal(0, 1)
//! ```
//!
//! For GARCH(1,1) the long-run moments are closed-form: the unconditional
//! variance is `alpha0 / (1 - alpha1 - beta1)` and the squared-return
//! correlation time is `1 / |ln(alpha1 + beta1)|`, which is what the
//! moment fit inverts.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::ProcessState;
use crate::rng::RngStream;

/// GARCH(p,q) coefficients. `alpha` weights the q squared-return lags,
/// `beta` the p variance lags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GarchParams {
    pub alpha0: f64,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

impl GarchParams {
    /// The GARCH(1,1) special case used by the presets.
    pub fn garch11(alpha0: f64, alpha1: f64, beta1: f64) -> Self {
        Self {
            alpha0,
            alpha: vec![alpha1],
            beta: vec![beta1],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.alpha0.is_finite() || self.alpha0 <= 0.0 {
            return Err(Error::invalid("alpha0", "must be > 0", self.alpha0));
        }
        for (i, &a) in self.alpha.iter().enumerate() {
            if !a.is_finite() || a < 0.0 {
                return Err(Error::InvalidParameter {
                    name: "alpha",
                    constraint: "every coefficient must be >= 0",
                    value: self.alpha[i],
                });
            }
        }
        for (j, &b) in self.beta.iter().enumerate() {
            if !b.is_finite() || b < 0.0 {
                return Err(Error::InvalidParameter {
                    name: "beta",
                    constraint: "every coefficient must be >= 0",
                    value: self.beta[j],
                });
            }
        }
        Ok(())
    }

    /// Sum of all lag coefficients; < 1 means covariance-stationary.
    pub fn persistence(&self) -> f64 {
        self.alpha.iter().sum::<f64>() + self.beta.iter().sum::<f64>()
    }

    pub fn is_stationary(&self) -> bool {
        self.persistence() < 1.0
    }

    /// Long-run variance `alpha0 / (1 - sum alpha - sum beta)`.
    pub fn unconditional_variance(&self) -> Result<f64> {
        if !self.is_stationary() {
            return Err(Error::Infeasible(format!(
                "unconditional variance undefined: sum of coefficients {} >= 1",
                self.persistence()
            )));
        }
        Ok(self.alpha0 / (1.0 - self.persistence()))
    }

    /// Correlation time of the squared-return process,
    /// `1 / |ln(sum alpha + sum beta)|` (exact for GARCH(1,1)).
    pub fn correlation_time(&self) -> Result<f64> {
        let s = self.persistence();
        if s.is_nan() || s <= 0.0 || s >= 1.0 {
            return Err(Error::Infeasible(format!(
                "correlation time undefined for coefficient sum {s}"
            )));
        }
        Ok(1.0 / s.ln().abs())
    }

    /// Warm-up discarded before statistics: ten correlation times.
    pub fn warmup_steps(&self) -> usize {
        match self.correlation_time() {
            Ok(tau) => (10.0 * tau).ceil() as usize,
            Err(_) => 0,
        }
    }
}

/// Ring buffers holding the q squared-return and p variance lags,
/// most recent first.
#[derive(Debug, Clone, PartialEq)]
pub struct GarchLags {
    x2: VecDeque<f64>,
    sigma2: VecDeque<f64>,
}

impl GarchLags {
    /// All lags initialized to `value` (warm start at a variance level).
    pub fn filled(p: &GarchParams, value: f64) -> Self {
        Self {
            x2: VecDeque::from(vec![value; p.alpha.len()]),
            sigma2: VecDeque::from(vec![value; p.beta.len()]),
        }
    }
}

/// One GARCH observation step. `state.x` holds the return x_t, `state.v`
/// the conditional variance sigma²_t; time advances by one step.
pub fn garch_step(mut state: ProcessState, p: &GarchParams, stream: &mut RngStream) -> ProcessState {
    let lags = state
        .aux
        .get_or_insert_with(|| GarchLags::filled(p, p.unconditional_variance().unwrap_or(p.alpha0)));

    let mut sigma2 = p.alpha0;
    for (coef, lag) in p.alpha.iter().zip(lags.x2.iter()) {
        sigma2 += coef * lag;
    }
    for (coef, lag) in p.beta.iter().zip(lags.sigma2.iter()) {
        sigma2 += coef * lag;
    }

    let x = stream.standard_normal() * sigma2.sqrt();

    if !lags.x2.is_empty() {
        lags.x2.pop_back();
        lags.x2.push_front(x * x);
    }
    if !lags.sigma2.is_empty() {
        lags.sigma2.pop_back();
        lags.sigma2.push_front(sigma2);
    }

    state.x = x;
    state.v = sigma2;
    state.t += 1.0;
    state
}

/// Inverts the GARCH(1,1) moment formulas for a target unconditional
/// variance and squared-return correlation time, with `alpha1` free:
/// `beta1 = exp(-1/tau) - alpha1`, `alpha0 = variance (1 - alpha1 - beta1)`.
pub fn garch_fit_from_moments(
    target_variance: f64,
    target_tau: f64,
    alpha1: f64,
) -> Result<GarchParams> {
    if target_variance.is_nan() || target_variance <= 0.0 {
        return Err(Error::invalid(
            "target_variance",
            "must be > 0",
            target_variance,
        ));
    }
    if target_tau.is_nan() || target_tau <= 0.0 {
        return Err(Error::invalid("target_tau", "must be > 0", target_tau));
    }
    if alpha1.is_nan() || alpha1 <= 0.0 {
        return Err(Error::invalid("alpha1", "must be > 0", alpha1));
    }
    let persistence = (-1.0 / target_tau).exp();
    let beta1 = persistence - alpha1;
    if beta1 < 0.0 {
        return Err(Error::Infeasible(format!(
            "alpha1 = {alpha1} exceeds exp(-1/tau) = {persistence}; beta1 would be negative"
        )));
    }
    let alpha0 = target_variance * (1.0 - persistence);
    Ok(GarchParams::garch11(alpha0, alpha1, beta1))
}
