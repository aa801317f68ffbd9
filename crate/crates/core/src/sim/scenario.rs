//! Scenario configuration shared by the analytic tables and the gossip
//! simulation.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::devices::{default_devices, DeviceProfile};
use crate::error::{Error, Result};
use crate::vdf::proof_len;

/// Puzzle family an attacker or honest node has to solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Function {
    #[serde(rename = "PoW")]
    Pow,
    #[serde(rename = "VDF")]
    Vdf,
}

impl std::fmt::Display for Function {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Function::Pow => "PoW",
            Function::Vdf => "VDF",
        })
    }
}

fn default_seed() -> u64 {
    7
}

/// Discrete-event gossip parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// Honest node count n.
    pub nodes: usize,
    /// Minimum neighbors per honest node, m ≪ n.
    pub neighbors: usize,
    /// Device name of the single attacker; `None` runs without one.
    #[serde(default)]
    pub attacker: Option<String>,
    pub duration_secs: f64,
    /// Allowed honest throughput α·m per node, transactions per second.
    pub honest_tx_per_sec: f64,
    /// One-hop propagation latency.
    pub link_latency_ns: u64,
    /// Pending verifications a node accepts before dropping arrivals.
    pub verify_queue_bound: usize,
    /// Per-transaction verification cost. Measured by `calibrate`; the
    /// simulation refuses to run without it.
    #[serde(default)]
    pub pow_verify_ns: Option<u64>,
    #[serde(default)]
    pub vdf_verify_ns: Option<u64>,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            nodes: 12,
            neighbors: 3,
            attacker: Some("FPGA".into()),
            duration_secs: 1.0,
            honest_tx_per_sec: 0.1,
            link_latency_ns: 50_000_000,
            verify_queue_bound: 100_000,
            pow_verify_ns: None,
            vdf_verify_ns: None,
            seed: default_seed(),
        }
    }
}

/// Everything the spam table, speedup report and gossip simulation read.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Transaction size without VDF proof, bytes.
    pub tx_base_size: u64,
    pub lambda: u64,
    pub k: u32,
    /// Mean PoW solving time on the baseline device, seconds.
    pub pow_target_seconds_on_cpu: f64,
    /// Device whose rates define the PoW target and reconstructed τ.
    pub baseline_device: String,
    /// VDF difficulty. `None` reconstructs it as the τ that takes the
    /// baseline device `pow_target_seconds_on_cpu` seconds.
    #[serde(default)]
    pub vdf_tau: Option<u64>,
    pub devices: Vec<DeviceProfile>,
    pub simulation: SimConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            tx_base_size: 1600,
            lambda: 2048,
            k: 128,
            pow_target_seconds_on_cpu: 10.0,
            baseline_device: "CPU".into(),
            vdf_tau: None,
            devices: default_devices(),
            simulation: SimConfig::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let cfg: Self = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda % 8 != 0 || self.k % 8 != 0 {
            return Err(Error::Config("λ and k must be multiples of 8".into()));
        }
        if !(self.pow_target_seconds_on_cpu > 0.0) {
            return Err(Error::Config("PoW target time must be positive".into()));
        }
        for d in &self.devices {
            d.validate()?;
        }
        let base = self.baseline()?;
        if base.hashes_per_sec.is_none() {
            return Err(Error::Config("baseline device needs a hash rate".into()));
        }
        if self.vdf_tau.is_none() && base.squarings_per_sec.is_none() {
            return Err(Error::Config(
                "baseline device needs a squaring rate to reconstruct τ".into(),
            ));
        }
        if self.vdf_tau == Some(0) {
            return Err(Error::Config("τ must be positive".into()));
        }
        let sim = &self.simulation;
        if sim.nodes < 2 || sim.neighbors == 0 || sim.neighbors >= sim.nodes {
            return Err(Error::Config(format!(
                "need n ≥ 2 and 1 ≤ m < n, got n = {}, m = {}",
                sim.nodes, sim.neighbors
            )));
        }
        if !(sim.duration_secs > 0.0) || !(sim.honest_tx_per_sec >= 0.0) {
            return Err(Error::Config("duration and honest rate must be positive".into()));
        }
        if let Some(name) = &sim.attacker {
            self.device(name)?;
        }
        Ok(())
    }

    pub fn device(&self, name: &str) -> Result<&DeviceProfile> {
        self.devices
            .iter()
            .find(|d| d.name == name)
            .ok_or_else(|| Error::Config(format!("unknown device {name:?}")))
    }

    pub fn baseline(&self) -> Result<&DeviceProfile> {
        self.device(&self.baseline_device)
    }

    /// Proof blob size in bytes, `(λ + 2k) / 8`.
    pub fn vdf_overhead(&self) -> u64 {
        proof_len(self.lambda, self.k) as u64
    }

    pub fn tx_size(&self, function: Function) -> u64 {
        match function {
            Function::Pow => self.tx_base_size,
            Function::Vdf => self.tx_base_size + self.vdf_overhead(),
        }
    }

    /// Hashes a PoW solution takes on average: the baseline's hash rate
    /// times the target time.
    pub fn pow_work(&self) -> Result<f64> {
        let base = self.baseline()?;
        Ok(base.hashes_per_sec.unwrap_or(f64::NAN) * self.pow_target_seconds_on_cpu)
    }

    pub fn tau(&self) -> Result<u64> {
        match self.vdf_tau {
            Some(t) => Ok(t),
            None => {
                let rate = self.baseline()?.squarings_per_sec.ok_or_else(|| {
                    Error::Config("baseline device has no squaring rate".into())
                })?;
                Ok((rate * self.pow_target_seconds_on_cpu).round() as u64)
            }
        }
    }

    /// Transactions per second `device` sustains under `function`, or
    /// `None` when the device lacks that capability.
    pub fn tx_rate(&self, device: &DeviceProfile, function: Function) -> Result<Option<f64>> {
        Ok(match function {
            Function::Pow => {
                let work = self.pow_work()?;
                device.hashes_per_sec.map(|h| h / work)
            }
            Function::Vdf => {
                let tau = self.tau()? as f64;
                device.squarings_per_sec.map(|s| s / tau)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_consistent() {
        let cfg = ScenarioConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.vdf_overhead(), 288);
        assert_eq!(cfg.tx_size(Function::Vdf), 1888);
        assert_eq!(cfg.tau().unwrap(), 10_000_000);
        assert_eq!(cfg.pow_work().unwrap(), 1e5);
    }

    #[test]
    fn validation_catches_bad_topology() {
        let mut cfg = ScenarioConfig::default();
        cfg.simulation.neighbors = 12;
        assert!(cfg.validate().is_err());
        cfg.simulation.neighbors = 3;
        cfg.simulation.attacker = Some("GPU".into());
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn json_round_trip() {
        let cfg = ScenarioConfig::default();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<ScenarioConfig>(&text).unwrap(), cfg);
        assert_eq!(serde_json::to_string(&Function::Vdf).unwrap(), "\"VDF\"");
    }
}
