//! Reputation-proportional difficulty.
//!
//! A node with reputation mass `m` may issue `γ = α·m` transactions per
//! second. With a reference squaring rate `σ`, that throughput corresponds to
//! a difficulty of `τ = σ / (α·m)` squarings per transaction.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type NodeId = [u8; 32];

/// Node id → reputation mass, plus the throughput scale α.
#[derive(Clone, Debug, Default)]
pub struct ReputationMap {
    alpha: f64,
    masses: HashMap<NodeId, f64>,
}

impl ReputationMap {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::Config(format!("α must be positive, got {alpha}")));
        }
        Ok(Self {
            alpha,
            masses: HashMap::new(),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn set(&mut self, node: NodeId, mass: f64) -> Result<()> {
        if !(mass.is_finite() && mass >= 0.0) {
            return Err(Error::Parameter(format!(
                "reputation must be non-negative, got {mass}"
            )));
        }
        self.masses.insert(node, mass);
        Ok(())
    }

    /// Unknown nodes have zero mass.
    pub fn mass(&self, node: &NodeId) -> f64 {
        self.masses.get(node).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }
}

/// Reference squaring rate σ, linking τ to wall-clock evaluation time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationCurve {
    squarings_per_sec: f64,
}

impl CalibrationCurve {
    pub fn new(squarings_per_sec: f64) -> Result<Self> {
        if !(squarings_per_sec.is_finite() && squarings_per_sec > 0.0) {
            return Err(Error::Config(format!(
                "squaring rate must be positive, got {squarings_per_sec}"
            )));
        }
        Ok(Self { squarings_per_sec })
    }

    pub fn squarings_per_sec(&self) -> f64 {
        self.squarings_per_sec
    }

    /// Expected evaluation time `τ / σ` in seconds.
    pub fn seconds_for(&self, tau: u64) -> f64 {
        tau as f64 / self.squarings_per_sec
    }

    /// Difficulty whose evaluation takes `seconds` at the reference rate.
    pub fn tau_for_seconds(&self, seconds: f64) -> u64 {
        (seconds * self.squarings_per_sec).round() as u64
    }

    /// Transactions per second a node achieves at difficulty τ.
    pub fn throughput(&self, tau: u64) -> f64 {
        self.squarings_per_sec / tau as f64
    }
}

/// Inclusive clamp range for τ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TauBounds {
    pub min: u64,
    pub max: u64,
}

impl TauBounds {
    pub fn new(min: u64, max: u64) -> Result<Self> {
        if min == 0 || min > max {
            return Err(Error::Config(format!(
                "τ bounds [{min}, {max}] must satisfy 1 ≤ min ≤ max"
            )));
        }
        Ok(Self { min, max })
    }

    /// Bounds that never clamp.
    pub fn unbounded() -> Self {
        Self {
            min: 1,
            max: u64::MAX,
        }
    }
}

/// Unclamped `σ / (α·m)` rounded to the nearest integer, at least 1.
pub fn raw_difficulty(mass: f64, alpha: f64, cal: &CalibrationCurve) -> Result<u64> {
    if !(mass > 0.0) {
        return Err(Error::NotPermitted("reputation mass is zero".into()));
    }
    let tau = (cal.squarings_per_sec / (alpha * mass)).round();
    Ok(if tau < 1.0 { 1 } else { tau.min(u64::MAX as f64) as u64 })
}

/// Required τ for `node`, clamped to `bounds`.
pub fn difficulty_for(
    node: &NodeId,
    rep: &ReputationMap,
    cal: &CalibrationCurve,
    bounds: &TauBounds,
) -> Result<u64> {
    let tau = raw_difficulty(rep.mass(node), rep.alpha, cal)?;
    Ok(tau.clamp(bounds.min, bounds.max))
}

/// Largest throughput error a single node can see from rounding τ to an
/// integer: `σ / ((τ−1)·τ)` transactions per second.
pub fn rounding_quantum(tau: u64, cal: &CalibrationCurve) -> f64 {
    if tau <= 1 {
        return cal.squarings_per_sec;
    }
    cal.squarings_per_sec / ((tau - 1) as f64 * tau as f64)
}

/// Ratio of the fastest to the slowest throughput in `thetas`.
pub fn speedup(thetas: &[f64]) -> Result<f64> {
    if thetas.is_empty() {
        return Err(Error::Parameter("speedup of an empty set".into()));
    }
    if thetas.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(Error::Parameter("throughputs must be positive".into()));
    }
    let max = thetas.iter().copied().fold(f64::MIN, f64::max);
    let min = thetas.iter().copied().fold(f64::MAX, f64::min);
    Ok(max / min)
}
