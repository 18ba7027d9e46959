//! Monte Carlo laboratory for escape-time statistics in stochastic
//! market models.
//!
//! Four models of price-return dynamics (geometric Brownian motion,
//! GARCH(p,q), the Heston stochastic-volatility model and a nonlinear
//! Heston variant with a cubic metastable potential) share one
//! integration substrate and one first-passage measurement harness. The
//! harness runs ensembles of escape events to an absorbing barrier,
//! estimates mean escape times with standard errors, sweeps model
//! parameters to map noise-enhanced-stability curves, and computes the
//! stylized-fact statistics (return/volatility distributions, moments,
//! autocorrelations) used to compare models against market data.

pub mod config;
pub mod error;
pub mod escape;
pub mod market;
pub mod models;
pub mod output;
pub mod potential;
pub mod rng;
pub mod stats;

pub use config::{fingerprint, SimConfig};
pub use error::{Error, Result};
pub use escape::{
    detect_nonmonotonicity, mean_escape_time, met_sweep, return_series_escape_times,
    run_escape_ensemble, simulate_restarted_series, Classification, EscapeEnsemble, EscapeSpec,
    MetEstimate, ReturnThresholds, SweepAxis, SweepPoint, VStartPolicy,
};
pub use models::{
    garch_fit_from_moments, gbm_escape_pf_analytic, simulate_returns, GarchParams, GbmParams,
    HestonParams, ModelParams, NlhParams, ProcessState,
};
pub use potential::{potential_gradient, potential_value, BarrierHeights, CubicPotential};
pub use rng::{cir_step, correlate, draw_wiener_pair, RngStream, StepConfig, WienerPair};
pub use stats::{
    autocorrelation, chi_square, empirical_pf, empirical_pf_with_range, goodness_of_fit, ks_test,
    log_abs_return_series, moments, AcfResult, Binning, EmpiricalPf, GofResult, MomentSummary,
};
