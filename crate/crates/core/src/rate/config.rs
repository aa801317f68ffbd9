//! Protocol configuration loaded from JSON.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::reputation::{CalibrationCurve, NodeId, ReputationMap, TauBounds};
use crate::arith::hash::check_k;
use crate::arith::validate_production_lambda;
use crate::error::{Error, Result};
use crate::multiexp::{DEFAULT_WINDOW, MAX_WINDOW};

fn default_skew() -> u64 {
    300
}

fn default_window() -> u32 {
    DEFAULT_WINDOW
}

/// Admission and issuing parameters shared by every node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    /// Modulus bit length.
    pub lambda: u64,
    /// Security parameter; hashes and l have 2k bits.
    pub k: u32,
    /// Transactions per second granted per unit of reputation.
    pub alpha: f64,
    pub tau_min: u64,
    pub tau_max: u64,
    /// Allowed distance between a first transaction's timestamp and the
    /// verifier clock.
    #[serde(default = "default_skew")]
    pub clock_skew_secs: u64,
    /// Window width for verification multiexp.
    #[serde(default = "default_window")]
    pub window: u32,
    /// Reference squaring rate σ used to turn throughput into τ.
    pub squarings_per_sec: f64,
    /// Allows moduli below the production minimum. For tests and demos.
    #[serde(default)]
    pub test_mode: bool,
    /// Hex-encoded public key → reputation mass.
    #[serde(default)]
    pub reputation: BTreeMap<String, f64>,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            lambda: 2048,
            k: 128,
            alpha: 0.1,
            tau_min: 1 << 10,
            tau_max: 1 << 30,
            clock_skew_secs: default_skew(),
            window: DEFAULT_WINDOW,
            squarings_per_sec: 1e6,
            test_mode: false,
            reputation: BTreeMap::new(),
        }
    }
}

pub fn parse_node_id(hex_key: &str) -> Result<NodeId> {
    let bytes = hex::decode(hex_key)
        .map_err(|e| Error::Config(format!("bad public key {hex_key:?}: {e}")))?;
    bytes
        .try_into()
        .map_err(|_| Error::Config(format!("public key {hex_key:?} is not 32 bytes")))
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        check_k(self.k)?;
        if self.lambda % 8 != 0 || self.k % 8 != 0 {
            return Err(Error::Config("λ and k must be multiples of 8".into()));
        }
        if self.lambda <= u64::from(2 * self.k) {
            return Err(Error::Config(format!(
                "λ = {} must exceed 2k = {}",
                self.lambda,
                2 * self.k
            )));
        }
        if !self.test_mode {
            validate_production_lambda(self.lambda)?;
        }
        if !(1..=MAX_WINDOW).contains(&self.window) {
            return Err(Error::Config(format!("window {} out of range", self.window)));
        }
        self.bounds()?;
        self.calibration()?;
        self.reputation_map()?;
        Ok(())
    }

    pub fn bounds(&self) -> Result<TauBounds> {
        TauBounds::new(self.tau_min, self.tau_max)
    }

    pub fn calibration(&self) -> Result<CalibrationCurve> {
        CalibrationCurve::new(self.squarings_per_sec)
    }

    pub fn reputation_map(&self) -> Result<ReputationMap> {
        let mut map = ReputationMap::new(self.alpha)?;
        for (key, mass) in &self.reputation {
            map.set(parse_node_id(key)?, *mass)?;
        }
        Ok(map)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: Self = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        ProtocolConfig::default().validate().unwrap();
    }

    #[test]
    fn production_lambda_policy() {
        let mut cfg = ProtocolConfig {
            lambda: 512,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        cfg.test_mode = true;
        cfg.validate().unwrap();
        cfg.lambda = 256;
        assert!(cfg.validate().is_err(), "λ must exceed 2k");
    }

    #[test]
    fn json_round_trip_and_defaults() {
        let text = r#"{"lambda":1024,"k":128,"alpha":0.5,"tau_min":1,"tau_max":100,
            "squarings_per_sec":2e5,"reputation":{"0101010101010101010101010101010101010101010101010101010101010101":3}}"#;
        let cfg: ProtocolConfig = serde_json::from_str(text).unwrap();
        assert_eq!(cfg.clock_skew_secs, 300);
        assert_eq!(cfg.window, 2);
        cfg.validate().unwrap();
        assert_eq!(cfg.reputation_map().unwrap().mass(&[1; 32]), 3.0);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        cfg.save(&path).unwrap();
        assert_eq!(ProtocolConfig::load(&path).unwrap(), cfg);
    }

    #[test]
    fn rejects_bad_fields() {
        assert!(serde_json::from_str::<ProtocolConfig>(r#"{"lambda":1024}"#).is_err());
        let cfg = ProtocolConfig {
            reputation: [("abcd".to_string(), 1.0)].into(),
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = ProtocolConfig {
            tau_min: 10,
            tau_max: 5,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }
}
