//! First-passage measurement: ensembles of trajectories run to an
//! absorbing barrier, the restart protocol with volatility carry-over,
//! mean-escape-time estimates and parameter sweeps with nonmonotonicity
//! detection.
//!
//! Reproducibility contract: event `i` of sweep point `p` always draws
//! from the RNG lane `(p << 32) | i`, so ensembles are independent of
//! scheduling and physical thread count. With volatility carry-over the
//! ensemble runs as `workers` logical chains (event `i` still owns lane
//! `i`; only the carried variance links events), and the worker count is
//! part of the reproducibility fingerprint.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::models::ModelParams;
use crate::rng::{RngStream, StepConfig};

/// Start/stop geometry of a barrier-mode escape experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EscapeSpec {
    /// Initial position x_o.
    pub x_start: f64,
    /// Absorbing barrier; crossing it ends an event.
    pub x_abs: f64,
    /// Variance at the start of the first event.
    pub v_start: f64,
    /// Restart events with the variance of the previous barrier hit
    /// instead of resetting to `v_start`.
    pub carry_volatility: bool,
    /// Censoring horizon; `None` means 10^7 time steps.
    pub max_time: Option<f64>,
}

impl EscapeSpec {
    pub fn new(x_start: f64, v_start: f64) -> Self {
        Self {
            x_start,
            x_abs: -6.0,
            v_start,
            carry_volatility: true,
            max_time: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.x_start.is_finite() || !self.x_abs.is_finite() {
            return Err(Error::invalid("x_start/x_abs", "must be finite", f64::NAN));
        }
        if self.x_abs >= self.x_start {
            return Err(Error::invalid(
                "x_abs",
                "absorbing barrier must lie below x_start",
                self.x_abs,
            ));
        }
        if self.v_start.is_nan() || self.v_start < 0.0 {
            return Err(Error::invalid("v_start", "must be >= 0", self.v_start));
        }
        if let Some(mt) = self.max_time {
            if mt.is_nan() || mt <= 0.0 {
                return Err(Error::invalid("max_time", "must be > 0", mt));
            }
        }
        Ok(())
    }

    fn censor_steps(&self, time_per_step: f64) -> u64 {
        match self.max_time {
            Some(mt) => ((mt / time_per_step).ceil() as u64).max(1),
            None => 10_000_000,
        }
    }
}

/// Threshold pair for escape times measured on a return series:
/// the clock arms at `delta_x_i` and the absorbing level is `delta_x_f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReturnThresholds {
    pub delta_x_i: f64,
    pub delta_x_f: f64,
}

impl ReturnThresholds {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta_x_f < self.delta_x_i && self.delta_x_i < 0.0) {
            return Err(Error::invalid(
                "thresholds",
                "must satisfy delta_x_f < delta_x_i < 0",
                self.delta_x_i,
            ));
        }
        Ok(())
    }
}

/// Escape times of one ensemble plus per-event diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct EscapeEnsemble {
    /// Escape times of the uncensored events, in event-index order.
    pub times: Vec<f64>,
    /// Events that hit the censoring horizon before the barrier.
    pub censored_count: usize,
    /// Fingerprint of the configuration that produced the ensemble.
    pub fingerprint: String,
    /// Variance at the start of each event (all events).
    pub v_initial: Vec<f64>,
    /// Variance when each event terminated (escape or censor).
    pub v_final: Vec<f64>,
    /// Per-event escape flag, index-aligned with `v_initial`/`v_final`.
    pub escaped: Vec<bool>,
}

impl EscapeEnsemble {
    pub fn n_events(&self) -> usize {
        self.escaped.len()
    }

    pub fn censored_fraction(&self) -> f64 {
        self.censored_count as f64 / self.n_events().max(1) as f64
    }

    /// MET estimates are reported as valid when less than 1% of events
    /// were censored.
    pub fn met_valid(&self) -> bool {
        self.censored_fraction() < 0.01
    }
}

/// Mean escape time with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetEstimate {
    pub met: f64,
    pub std_error: f64,
    pub n_events: usize,
}

/// Sample mean of the escape times; standard error is the sample
/// standard deviation over sqrt(n).
pub fn mean_escape_time(ens: &EscapeEnsemble) -> Result<MetEstimate> {
    met_from_times(&ens.times)
}

pub(crate) fn met_from_times(times: &[f64]) -> Result<MetEstimate> {
    if times.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "MET needs >= 2 uncensored events, got {}",
            times.len()
        )));
    }
    // accumulate around the first sample so that identical times give a
    // bit-exact zero spread
    let n = times.len() as f64;
    let t0 = times[0];
    let shifted_mean = times.iter().map(|t| t - t0).sum::<f64>() / n;
    let var = times
        .iter()
        .map(|t| {
            let d = (t - t0) - shifted_mean;
            d * d
        })
        .sum::<f64>()
        / (n - 1.0);
    Ok(MetEstimate {
        met: t0 + shifted_mean,
        std_error: (var / n).sqrt(),
        n_events: times.len(),
    })
}

struct EventOutcome {
    escaped: bool,
    time: f64,
    v_initial: f64,
    v_final: f64,
}

fn run_event(
    model: &ModelParams,
    spec: &EscapeSpec,
    stream: &mut RngStream,
    step: StepConfig,
    v0: f64,
) -> EventOutcome {
    let time_per_step = model.time_per_step(step.dt);
    let mut state = model.init_state(spec.x_start, v0);
    let v_initial = state.v;
    let mut pos = spec.x_start;
    for k in 1..=step.max_steps {
        state = model.step(state, stream, step.dt);
        // GARCH reports returns; accumulate them into a position
        if model.is_discrete() {
            pos += state.x;
        } else {
            pos = state.x;
        }
        if pos <= spec.x_abs {
            return EventOutcome {
                escaped: true,
                time: k as f64 * time_per_step,
                v_initial,
                v_final: state.v,
            };
        }
    }
    EventOutcome {
        escaped: false,
        time: step.max_steps as f64 * time_per_step,
        v_initial,
        v_final: state.v,
    }
}

/// Runs an ensemble of `n_events` escape events.
///
/// Every event `i` draws from RNG lane `(seed, i)`. Without carry-over
/// events are fully independent and are run in parallel; with carry-over
/// the ensemble is split into `sim.workers` chains, each threading its
/// final variance into the next event start.
pub fn run_escape_ensemble(
    model: &ModelParams,
    spec: &EscapeSpec,
    n_events: usize,
    sim: &SimConfig,
) -> Result<EscapeEnsemble> {
    run_escape_ensemble_with_lane(model, spec, n_events, sim, 0)
}

/// As [`run_escape_ensemble`], drawing from lanes `lane_base + i`.
/// Sweeps use `lane_base = point_index << 32` for per-point independence.
pub fn run_escape_ensemble_with_lane(
    model: &ModelParams,
    spec: &EscapeSpec,
    n_events: usize,
    sim: &SimConfig,
    lane_base: u64,
) -> Result<EscapeEnsemble> {
    model.validate()?;
    spec.validate()?;
    sim.validate()?;
    if n_events < 1 {
        return Err(Error::invalid("n_events", "must be >= 1", 0.0));
    }
    assert!(
        n_events as u64 <= u32::MAX as u64,
        "event lanes are limited to 2^32 per sweep point"
    );
    let step = StepConfig {
        dt: sim.dt,
        max_steps: spec.censor_steps(model.time_per_step(sim.dt)),
    };
    step.validate()?;

    let outcomes: Vec<EventOutcome> = if spec.carry_volatility {
        let workers = sim.workers.max(1).min(n_events);
        let q = n_events / workers;
        let r = n_events % workers;
        (0..workers)
            .into_par_iter()
            .map(|w| {
                let start = w * q + w.min(r);
                let len = q + usize::from(w < r);
                let mut chain = Vec::with_capacity(len);
                let mut v = spec.v_start;
                for i in start..start + len {
                    let mut stream = RngStream::new(sim.seed, lane_base + i as u64);
                    let out = run_event(model, spec, &mut stream, step, v);
                    v = out.v_final;
                    chain.push(out);
                }
                chain
            })
            .flatten()
            .collect()
    } else {
        (0..n_events)
            .into_par_iter()
            .map(|i| {
                let mut stream = RngStream::new(sim.seed, lane_base + i as u64);
                run_event(model, spec, &mut stream, step, spec.v_start)
            })
            .collect()
    };

    let mut ens = EscapeEnsemble {
        times: Vec::new(),
        censored_count: 0,
        fingerprint: String::new(),
        v_initial: Vec::with_capacity(n_events),
        v_final: Vec::with_capacity(n_events),
        escaped: Vec::with_capacity(n_events),
    };
    for out in outcomes {
        if out.escaped {
            ens.times.push(out.time);
        } else {
            ens.censored_count += 1;
        }
        ens.v_initial.push(out.v_initial);
        ens.v_final.push(out.v_final);
        ens.escaped.push(out.escaped);
    }
    if ens.times.is_empty() {
        return Err(Error::DegenerateEnsemble(n_events));
    }
    Ok(ens)
}

/// Escape times, in steps, of a return series against armed thresholds.
///
/// The clock arms at the first observation at or below `delta_x_i`,
/// counts steps until an observation at or below `delta_x_f` (the escape,
/// recorded), then re-arms at the next observation at or below
/// `delta_x_i`. An interval still open at the end of the series is
/// discarded.
pub fn return_series_escape_times(returns: &[f64], th: &ReturnThresholds) -> Vec<u64> {
    let mut times = Vec::new();
    let mut armed_at: Option<usize> = None;
    for (i, &r) in returns.iter().enumerate() {
        match armed_at {
            None => {
                if r <= th.delta_x_i {
                    armed_at = Some(i);
                }
            }
            Some(start) => {
                if r <= th.delta_x_f {
                    times.push((i - start) as u64);
                    armed_at = None;
                }
            }
        }
    }
    times
}

/// Return series generated under the restart protocol: the process runs
/// from `x_start`, and every barrier hit restarts the position while the
/// variance either carries over or resets.
#[derive(Debug, Clone)]
pub struct SeriesRecord {
    /// Per-step increments of x; the restart teleport never appears.
    pub returns: Vec<f64>,
    /// Variance after each step, index-aligned with `returns`.
    pub volatilities: Vec<f64>,
    /// Barrier hits during the series.
    pub restarts: usize,
}

/// Simulates `n_obs` observation steps of the restarted process.
pub fn simulate_restarted_series(
    model: &ModelParams,
    spec: &EscapeSpec,
    n_obs: usize,
    sim: &SimConfig,
) -> Result<SeriesRecord> {
    model.validate()?;
    spec.validate()?;
    sim.validate()?;
    let mut stream = RngStream::new(sim.seed, 0);
    let mut state = model.init_state(spec.x_start, spec.v_start);
    let mut rec = SeriesRecord {
        returns: Vec::with_capacity(n_obs),
        volatilities: Vec::with_capacity(n_obs),
        restarts: 0,
    };
    let mut pos = spec.x_start;
    let mut prev_x = state.x;
    for _ in 0..n_obs {
        state = model.step(state, &mut stream, sim.dt);
        // discrete models report the return itself; continuous models
        // report the increment of x
        let ret = if model.is_discrete() {
            state.x
        } else {
            state.x - prev_x
        };
        rec.returns.push(ret);
        rec.volatilities.push(state.v);
        if model.is_discrete() {
            pos += ret;
        } else {
            pos = state.x;
        }
        if pos <= spec.x_abs {
            rec.restarts += 1;
            let v = if spec.carry_volatility {
                state.v
            } else {
                spec.v_start
            };
            state = model.init_state(spec.x_start, v);
            pos = spec.x_start;
        }
        prev_x = state.x;
    }
    Ok(rec)
}

/// Parameter axis of a MET sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    A,
    B,
    C,
    Rho,
    XStart,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::A => "a",
            SweepAxis::B => "b",
            SweepAxis::C => "c",
            SweepAxis::Rho => "rho",
            SweepAxis::XStart => "x_start",
        }
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" => Ok(SweepAxis::A),
            "b" => Ok(SweepAxis::B),
            "c" => Ok(SweepAxis::C),
            "rho" => Ok(SweepAxis::Rho),
            "x_start" => Ok(SweepAxis::XStart),
            _ => Err(Error::DegenerateInput(format!(
                "unknown sweep axis `{s}` (expected a, b, c, rho or x_start)"
            ))),
        }
    }
}

/// Starting-variance policy for sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VStartPolicy {
    /// Every point starts at `spec.v_start`.
    #[default]
    Fixed,
    /// Sweeping over b, each point starts at its own reverting level
    /// (the constant-volatility reading of the revert-only regime).
    TrackB,
}

/// One point of a sweep curve.
#[derive(Debug)]
pub struct SweepPoint {
    pub value: f64,
    pub met: Result<MetEstimate>,
    pub n_events: usize,
    pub censored_count: usize,
}

impl SweepPoint {
    pub fn censored_fraction(&self) -> f64 {
        self.censored_count as f64 / self.n_events.max(1) as f64
    }
}

fn apply_axis(
    axis: SweepAxis,
    value: f64,
    model: &ModelParams,
    spec: &EscapeSpec,
) -> Result<(ModelParams, EscapeSpec)> {
    let mut model = model.clone();
    let mut spec = *spec;
    match axis {
        SweepAxis::XStart => spec.x_start = value,
        SweepAxis::A | SweepAxis::B | SweepAxis::C | SweepAxis::Rho => match &mut model {
            ModelParams::Heston(p) => match axis {
                SweepAxis::A => p.a = value,
                SweepAxis::B => p.b = value,
                SweepAxis::C => p.c = value,
                SweepAxis::Rho => p.rho = value,
                SweepAxis::XStart => unreachable!(),
            },
            ModelParams::Nlh(p) => match axis {
                SweepAxis::A => p.a = value,
                SweepAxis::B => p.b = value,
                SweepAxis::C => p.c = value,
                SweepAxis::Rho => p.rho = value,
                SweepAxis::XStart => unreachable!(),
            },
            other => {
                return Err(Error::DegenerateInput(format!(
                    "axis `{}` is not a parameter of the {} model",
                    axis.name(),
                    other.name()
                )))
            }
        },
    }
    Ok((model, spec))
}

/// Runs one escape ensemble per axis value, each on its own lane block,
/// deterministic under a fixed seed. Failed points are carried in the
/// curve rather than dropped.
pub fn met_sweep(
    axis: SweepAxis,
    values: &[f64],
    model: &ModelParams,
    spec: &EscapeSpec,
    sim: &SimConfig,
    v_policy: VStartPolicy,
) -> Result<Vec<SweepPoint>> {
    if values.is_empty() {
        return Err(Error::InsufficientData("sweep needs at least one value".into()));
    }
    if v_policy == VStartPolicy::TrackB && axis != SweepAxis::B {
        return Err(Error::DegenerateInput(
            "v_start can only track the axis when sweeping over b".into(),
        ));
    }
    assert!(
        values.len() as u64 <= u32::MAX as u64,
        "sweep lanes are limited to 2^32 points"
    );
    let mut curve = Vec::with_capacity(values.len());
    for (idx, &value) in values.iter().enumerate() {
        let point = match apply_axis(axis, value, model, spec) {
            Ok((m, mut s)) => {
                if v_policy == VStartPolicy::TrackB {
                    s.v_start = value;
                }
                match run_escape_ensemble_with_lane(&m, &s, sim.n_events, sim, (idx as u64) << 32)
                {
                    Ok(ens) => SweepPoint {
                        value,
                        n_events: ens.n_events(),
                        censored_count: ens.censored_count,
                        met: mean_escape_time(&ens),
                    },
                    Err(e) => SweepPoint {
                        value,
                        n_events: sim.n_events,
                        censored_count: 0,
                        met: Err(e),
                    },
                }
            }
            Err(e) => SweepPoint {
                value,
                n_events: 0,
                censored_count: 0,
                met: Err(e),
            },
        };
        curve.push(point);
    }
    Ok(curve)
}

/// Extracts the successful points of a sweep curve.
pub fn ok_points(curve: &[SweepPoint]) -> Vec<(f64, MetEstimate)> {
    curve
        .iter()
        .filter_map(|p| p.met.as_ref().ok().map(|m| (p.value, *m)))
        .collect()
}

/// Shape classification of a MET curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    MonotoneDecreasing,
    SingleMaximum,
    MinThenMax,
    NoisyInconclusive,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Classification::MonotoneDecreasing => "monotone-decreasing",
            Classification::SingleMaximum => "single-maximum",
            Classification::MinThenMax => "min-then-max",
            Classification::NoisyInconclusive => "noisy-inconclusive",
        };
        f.write_str(s)
    }
}

/// Default significance multiple for [`detect_nonmonotonicity`].
pub const DEFAULT_K_SIGMA: f64 = 3.0;

/// Classifies a MET curve with the default 3-sigma significance.
pub fn detect_nonmonotonicity(curve: &[(f64, MetEstimate)]) -> Result<Classification> {
    detect_nonmonotonicity_with(curve, DEFAULT_K_SIGMA)
}

/// Classifies a MET curve. An extremum counts only when it differs from
/// both neighbors by at least `k_sigma` combined standard errors.
pub fn detect_nonmonotonicity_with(
    curve: &[(f64, MetEstimate)],
    k_sigma: f64,
) -> Result<Classification> {
    let n = curve.len();
    if n < 5 {
        return Err(Error::InsufficientData(format!(
            "classification needs >= 5 points, got {n}"
        )));
    }
    let met = |i: usize| curve[i].1.met;
    let comb = |i: usize, j: usize| {
        let a = curve[i].1.std_error;
        let b = curve[j].1.std_error;
        (a * a + b * b).sqrt()
    };

    let mut maxima = Vec::new();
    let mut minima = Vec::new();
    for i in 1..n - 1 {
        let up_l = met(i) - met(i - 1);
        let up_r = met(i) - met(i + 1);
        if up_l >= k_sigma * comb(i, i - 1) && up_r >= k_sigma * comb(i, i + 1) {
            maxima.push(i);
        }
        if -up_l >= k_sigma * comb(i, i - 1) && -up_r >= k_sigma * comb(i, i + 1) {
            minima.push(i);
        }
    }

    if maxima.is_empty() && minima.is_empty() {
        let overall_drop = met(0) - met(n - 1) >= k_sigma * comb(0, n - 1);
        let no_significant_rise =
            (0..n - 1).all(|i| met(i + 1) - met(i) < k_sigma * comb(i, i + 1));
        if overall_drop && no_significant_rise {
            return Ok(Classification::MonotoneDecreasing);
        }
        return Ok(Classification::NoisyInconclusive);
    }

    if minima
        .iter()
        .any(|&m| maxima.iter().any(|&mx| mx > m))
    {
        return Ok(Classification::MinThenMax);
    }
    if maxima.len() == 1 && minima.is_empty() {
        return Ok(Classification::SingleMaximum);
    }
    Ok(Classification::NoisyInconclusive)
}
