use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Acceptance check ids, in criterion order.
pub const CHECK_IDS: [&str; 12] = [
    "cutoff_exactness",
    "smoothness_constant",
    "commutation",
    "operator_decomposition",
    "integrated_bochner",
    "measure_lemma",
    "linear_exactness",
    "uniform_decay",
    "interior_cone_rate",
    "calibrated_inequalities",
    "bootstrap_stability",
    "l1_bootstrap",
];

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub pass: Option<bool>,
    pub value: Option<f64>,
    pub bound: Option<f64>,
}

/// Every check id is present; checks a command did not evaluate carry `pass: null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Verdict(pub BTreeMap<String, CheckResult>);

impl Default for Verdict {
    fn default() -> Self {
        Verdict(CHECK_IDS.iter().map(|id| (id.to_string(), CheckResult::default())).collect())
    }
}

impl Verdict {
    pub fn set(&mut self, id: &str, pass: bool, value: f64, bound: f64) {
        let v = if value.is_finite() { Some(value) } else { None };
        let b = if bound.is_finite() { Some(bound) } else { None };
        self.0.insert(id.to_string(), CheckResult { pass: Some(pass), value: v, bound: b });
    }

    pub fn any_failed(&self) -> bool {
        self.0.values().any(|c| c.pass == Some(false))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdict serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schema_has_every_id() {
        let mut v = Verdict::default();
        v.set("commutation", true, 1e-12, 1e-8);
        let j: serde_json::Value = serde_json::from_str(&v.to_json()).unwrap();
        for id in CHECK_IDS {
            assert!(j.get(id).is_some());
        }
        assert!(j["uniform_decay"]["pass"].is_null());
        assert!(!v.any_failed());
        v.set("uniform_decay", false, -0.5, -0.9);
        assert!(v.any_failed());
    }
}
