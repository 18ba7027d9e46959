//! Experiment configuration: TOML schema, validation, canonical form and
//! fingerprinting.

use std::path::{Path, PathBuf};

use escapelab_core::{
    escape::{SweepAxis, VStartPolicy},
    EscapeSpec, Error, ModelParams, Result, SimConfig,
};
use serde::{Deserialize, Serialize};

/// What the experiment computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// One escape ensemble to the absorbing barrier.
    Ensemble,
    /// MET as a function of one model parameter.
    MetSweep,
    /// Return-series statistics: moments, PFs, autocorrelations.
    SeriesStats,
    /// Escape times of the return series against sigma-scaled thresholds.
    ReturnEscape,
}

/// Sweep values: explicit list or a generated grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSection {
    pub axis: SweepAxis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub v_start_policy: VStartPolicy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    #[serde(default = "default_spacing")]
    pub spacing: Spacing,
}

fn default_spacing() -> Spacing {
    Spacing::Log
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

impl GridSpec {
    pub fn expand(&self) -> Result<Vec<f64>> {
        if self.points < 2 {
            return Err(Error::InvalidParameter {
                name: "sweep.grid.points",
                constraint: "must be >= 2",
                value: self.points as f64,
            });
        }
        match self.spacing {
            Spacing::Linear => {
                let step = (self.hi - self.lo) / (self.points - 1) as f64;
                Ok((0..self.points)
                    .map(|i| self.lo + step * i as f64)
                    .collect())
            }
            Spacing::Log => {
                if !(self.lo > 0.0 && self.hi > self.lo) {
                    return Err(Error::InvalidParameter {
                        name: "sweep.grid",
                        constraint: "log spacing needs 0 < lo < hi",
                        value: self.lo,
                    });
                }
                let llo = self.lo.ln();
                let step = (self.hi.ln() - llo) / (self.points - 1) as f64;
                Ok((0..self.points)
                    .map(|i| (llo + step * i as f64).exp())
                    .collect())
            }
        }
    }
}

/// Threshold multipliers in units of the series standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSection {
    pub k_i: f64,
    pub k_f: f64,
}

/// Return-series generation and statistics options.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesSection {
    pub n_obs: usize,
    /// Restart protocol (barrier + reposition) vs free-running process.
    #[serde(default = "default_true")]
    pub restarted: bool,
    #[serde(default = "default_acf_lag")]
    pub acf_max_lag: usize,
    #[serde(default = "default_pf_bins")]
    pub pf_bins: usize,
}

fn default_true() -> bool {
    true
}
fn default_acf_lag() -> usize {
    100
}
fn default_pf_bins() -> usize {
    50
}

impl Default for SeriesSection {
    fn default() -> Self {
        Self {
            n_obs: 1_000_000,
            restarted: true,
            acf_max_lag: default_acf_lag(),
            pf_bins: default_pf_bins(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputSection {
    pub dir: PathBuf,
}

/// Reference data for goodness-of-fit comparison of escape-time PFs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareSection {
    /// Pooled empirical escape times (one integer step count per line,
    /// as written by `ingest`).
    pub escape_steps: PathBuf,
}

/// A fully specified experiment. The canonical TOML dump of everything
/// except `[output]` defines the fingerprint; the worker count is part
/// of it only when volatility carry-over makes it result-relevant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub model: ModelParams,
    pub escape: EscapeSpec,
    pub sim: SimConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<ThresholdSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<SeriesSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare: Option<CompareSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSection>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Parse {
            line: 0,
            column: None,
            msg: e.to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        self.escape.validate()?;
        self.sim.validate()?;
        match self.kind {
            ExperimentKind::MetSweep => {
                let sweep = self.sweep.as_ref().ok_or(Error::InvalidParameter {
                    name: "sweep",
                    constraint: "required for kind = met-sweep",
                    value: f64::NAN,
                })?;
                let n = self.sweep_values()?.len();
                if n == 0 {
                    return Err(Error::InvalidParameter {
                        name: "sweep.values",
                        constraint: "must be nonempty",
                        value: 0.0,
                    });
                }
                if sweep.v_start_policy == VStartPolicy::TrackB && sweep.axis != SweepAxis::B {
                    return Err(Error::InvalidParameter {
                        name: "sweep.v_start_policy",
                        constraint: "track_b is only valid with axis = b",
                        value: f64::NAN,
                    });
                }
            }
            ExperimentKind::SeriesStats => {
                self.require_series()?;
            }
            ExperimentKind::ReturnEscape => {
                let series = self.require_series()?;
                let th = self.thresholds.ok_or(Error::InvalidParameter {
                    name: "thresholds",
                    constraint: "required for kind = return-escape",
                    value: f64::NAN,
                })?;
                if !(th.k_f < th.k_i && th.k_i < 0.0) {
                    return Err(Error::InvalidParameter {
                        name: "thresholds.k_i",
                        constraint: "must satisfy k_f < k_i < 0",
                        value: th.k_i,
                    });
                }
                if series.n_obs < 2 {
                    return Err(Error::InvalidParameter {
                        name: "series.n_obs",
                        constraint: "must be >= 2",
                        value: series.n_obs as f64,
                    });
                }
            }
            ExperimentKind::Ensemble => {}
        }
        Ok(())
    }

    fn require_series(&self) -> Result<&SeriesSection> {
        self.series.as_ref().ok_or(Error::InvalidParameter {
            name: "series",
            constraint: "required for this experiment kind",
            value: f64::NAN,
        })
    }

    pub fn sweep_values(&self) -> Result<Vec<f64>> {
        let sweep = self.sweep.as_ref().ok_or(Error::InvalidParameter {
            name: "sweep",
            constraint: "missing sweep section",
            value: f64::NAN,
        })?;
        match (&sweep.values, &sweep.grid) {
            (Some(v), None) => Ok(v.clone()),
            (None, Some(g)) => g.expand(),
            (Some(_), Some(_)) => Err(Error::InvalidParameter {
                name: "sweep",
                constraint: "give either values or grid, not both",
                value: f64::NAN,
            }),
            (None, None) => Err(Error::InvalidParameter {
                name: "sweep",
                constraint: "needs values or grid",
                value: f64::NAN,
            }),
        }
    }

    /// Canonical TOML dump: validated config without the output section.
    pub fn canonical(&self) -> String {
        let mut c = self.clone();
        c.output = None;
        toml::to_string(&c).expect("config serializes")
    }

    /// Fingerprint over the canonical form. The `workers` line is
    /// excluded unless volatility carry-over makes it result-relevant.
    pub fn fingerprint(&self) -> String {
        let canonical = self.canonical();
        let subject: String = if self.escape.carry_volatility {
            canonical
        } else {
            canonical
                .lines()
                .filter(|l| !l.starts_with("workers = "))
                .collect::<Vec<_>>()
                .join("\n")
        };
        escapelab_core::fingerprint(&subject)
    }

    /// Output directory: `[output] dir`, else `$ESCAPELAB_OUT`, else cwd.
    pub fn out_dir(&self) -> PathBuf {
        if let Some(out) = &self.output {
            return out.dir.clone();
        }
        if let Ok(dir) = std::env::var("ESCAPELAB_OUT") {
            if !dir.is_empty() {
                return PathBuf::from(dir);
            }
        }
        PathBuf::from(".")
    }
}
