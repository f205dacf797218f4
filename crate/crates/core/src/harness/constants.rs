//! Calibrated constants for the inequality checks.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Constants shipped with the crate.
pub const BUNDLED: &str = include_str!("../../data/constants.json");

/// Re-measured constants may exceed the stored ones by this factor.
pub const TOLERANCE: f64 = 1.05;

pub const NAMES: [&str; 6] = ["C_wb", "C_ext", "C_sob", "C_int", "C_meas", "C_chi"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibratedConstants {
    pub version: u32,
    /// seed of the pinned ensembles
    #[serde(default)]
    pub seed: u64,
    pub constants: BTreeMap<String, f64>,
    /// how each constant was measured
    #[serde(default)]
    pub provenance: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantCheck {
    pub name: String,
    pub measured: f64,
    pub stored: f64,
    pub pass: bool,
}

impl CalibratedConstants {
    pub fn bundled() -> CalibratedConstants {
        serde_json::from_str(BUNDLED).expect("bundled constants parse")
    }

    pub fn load(path: &Path) -> Result<CalibratedConstants> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<f64> {
        self.constants.get(name).copied().ok_or_else(|| Error::Config(format!("no calibrated constant {name}")))
    }

    /// measured ≤ 1.05 × stored
    pub fn check(&self, name: &str, measured: f64) -> Result<ConstantCheck> {
        let stored = self.get(name)?;
        Ok(ConstantCheck { name: name.into(), measured, stored, pass: measured.is_finite() && measured <= TOLERANCE * stored })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_has_all_names() {
        let c = CalibratedConstants::bundled();
        for n in NAMES {
            assert!(c.get(n).unwrap() > 0.0, "{n}");
        }
        let chk = c.check("C_chi", c.get("C_chi").unwrap() * 1.04).unwrap();
        assert!(chk.pass);
        let chk = c.check("C_chi", c.get("C_chi").unwrap() * 1.06).unwrap();
        assert!(!chk.pass);
    }
}
