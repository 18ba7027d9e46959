//! Simulation configuration and config fingerprinting.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Execution parameters shared by every experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Integration step for the continuous-time models.
    pub dt: f64,
    /// Master seed; every event lane is derived from it.
    pub seed: u64,
    /// Events per ensemble (or per sweep point).
    pub n_events: usize,
    /// Logical worker count. Only meaningful for results when volatility
    /// carry-over chains events; otherwise it is purely an execution hint.
    pub workers: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 0.01,
            seed: 1,
            n_events: 10_000,
            workers: 2,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.dt.is_finite() || self.dt <= 0.0 {
            return Err(Error::invalid("dt", "must be finite and > 0", self.dt));
        }
        if self.workers < 1 {
            return Err(Error::invalid("workers", "must be >= 1", 0.0));
        }
        if self.n_events < 1 {
            return Err(Error::invalid("n_events", "must be >= 1", 0.0));
        }
        Ok(())
    }
}

/// Hex fingerprint (first 16 chars of SHA-256) of a canonical config dump.
///
/// The canonical text must already exclude anything that cannot change
/// results: output paths always, and the worker count whenever no
/// volatility carry-over chains events together.
pub fn fingerprint(canonical: &str) -> String {
    let digest = Sha256::digest(canonical.as_bytes());
    hex::encode(digest)[..16].to_string()
}
