//! Analytic spam-potential and speedup tables. Pure functions of the
//! scenario; no timing is involved.

use serde::Serialize;

use super::scenario::{Function, ScenarioConfig};
use crate::error::{Error, Result};
use crate::rate::speedup;

/// One device under one function. `None` fields render as "n/a".
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpamRow {
    pub device: String,
    pub function: Function,
    pub tx_per_sec: Option<f64>,
    pub bandwidth_bps: Option<f64>,
    pub speedup_vs_baseline: Option<f64>,
}

/// Maximum spam a single device can emit under each function. Rows are
/// ordered by device name, then PoW before VDF.
pub fn spam_potential(cfg: &ScenarioConfig) -> Result<Vec<SpamRow>> {
    cfg.validate()?;
    let base = cfg.baseline()?;
    let mut rows = Vec::new();
    for device in &cfg.devices {
        for function in [Function::Pow, Function::Vdf] {
            let rate = cfg.tx_rate(device, function)?;
            // ratio of raw capacities; the per-tx work cancels exactly
            let capacity = |d: &crate::sim::DeviceProfile| match function {
                Function::Pow => d.hashes_per_sec,
                Function::Vdf => d.squarings_per_sec,
            };
            rows.push(SpamRow {
                device: device.name.clone(),
                function,
                tx_per_sec: rate,
                bandwidth_bps: rate.map(|r| r * cfg.tx_size(function) as f64 * 8.0),
                speedup_vs_baseline: match (capacity(device), capacity(base)) {
                    (Some(c), Some(b)) => Some(c / b),
                    _ => None,
                },
            });
        }
    }
    rows.sort_by(|a, b| (&a.device, a.function).cmp(&(&b.device, b.function)));
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpeedupRow {
    pub device: String,
    pub function: Function,
    pub pool_size: u64,
    /// Throughput of the pool relative to one unit of the weakest device.
    pub speedup: Option<f64>,
    pub cost_usd_per_hour: Option<f64>,
}

/// Speedup of each device, alone or pooled, over the weakest single device
/// for the same function. Pooling multiplies PoW throughput and cost; a VDF
/// pool still waits for one sequential chain, so only its cost grows.
pub fn speedup_report(cfg: &ScenarioConfig, pool_size: u64) -> Result<Vec<SpeedupRow>> {
    if pool_size == 0 {
        return Err(Error::Parameter("pool size must be at least 1".into()));
    }
    cfg.validate()?;
    let mut rows = Vec::new();
    for function in [Function::Pow, Function::Vdf] {
        let rates: Vec<Option<f64>> = cfg
            .devices
            .iter()
            .map(|d| cfg.tx_rate(d, function))
            .collect::<Result<_>>()?;
        let weakest = rates
            .iter()
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min);
        for (device, rate) in cfg.devices.iter().zip(rates) {
            let pooled = rate.map(|r| match function {
                Function::Pow => r * pool_size as f64,
                Function::Vdf => r,
            });
            rows.push(SpeedupRow {
                device: device.name.clone(),
                function,
                pool_size,
                speedup: pooled.map(|p| speedup(&[p, weakest])).transpose()?,
                cost_usd_per_hour: device.cost_usd_per_hour.map(|c| c * pool_size as f64),
            });
        }
    }
    Ok(rows)
}
