//! Device capability profiles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const DEFAULT_DEVICES: &str = include_str!("../../data/devices.json");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceProfile {
    pub name: String,
    /// SHA-256 evaluations per second; `None` when the device has no PoW
    /// figure.
    #[serde(default)]
    pub hashes_per_sec: Option<f64>,
    /// Sequential modular squarings per second; `None` when no VDF
    /// implementation exists for the device.
    #[serde(default)]
    pub squarings_per_sec: Option<f64>,
    #[serde(default)]
    pub cost_usd_per_hour: Option<f64>,
}

impl DeviceProfile {
    pub fn validate(&self) -> Result<()> {
        for (what, v) in [
            ("hashes_per_sec", self.hashes_per_sec),
            ("squarings_per_sec", self.squarings_per_sec),
            ("cost_usd_per_hour", self.cost_usd_per_hour),
        ] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::Config(format!(
                        "device {}: {what} must be positive",
                        self.name
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Deserialize)]
struct DeviceFile {
    devices: Vec<DeviceProfile>,
}

/// The shipped CPU / FPGA / ASIC profiles.
pub fn default_devices() -> Vec<DeviceProfile> {
    parse_devices(DEFAULT_DEVICES).expect("shipped device file is valid")
}

/// Parses a device file: `{"devices": [...]}` with an optional `note`.
pub fn parse_devices(json: &str) -> Result<Vec<DeviceProfile>> {
    let value: serde_json::Value = serde_json::from_str(json)?;
    let file: DeviceFile = serde_json::from_value(serde_json::json!({
        "devices": value.get("devices").cloned().unwrap_or(value.clone())
    }))?;
    for d in &file.devices {
        d.validate()?;
    }
    Ok(file.devices)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_profiles() {
        let d = default_devices();
        let names: Vec<_> = d.iter().map(|d| d.name.as_str()).collect();
        assert_eq!(names, ["CPU", "FPGA", "ASIC"]);
        assert_eq!(d[2].squarings_per_sec, None);
        assert_eq!(d[1].hashes_per_sec, Some(1e10));
    }

    #[test]
    fn bare_list_and_validation() {
        let d = parse_devices(r#"[{"name":"x","hashes_per_sec":5}]"#).unwrap();
        assert_eq!(d[0].squarings_per_sec, None);
        assert!(parse_devices(r#"[{"name":"x","hashes_per_sec":-5}]"#).is_err());
        assert!(parse_devices(r#"[{"name":"x","speed":5}]"#).is_err());
    }
}
