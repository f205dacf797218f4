//! Bootstrap-norm monitoring for small-data runs.

use serde::{Deserialize, Serialize};

use super::diagnostics::DiagnosticsRow;
use crate::solver::{Flags, Trajectory};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BootstrapMode {
    /// Σ E_i + ⟨t⟩^{3/2−2δ}N_high_i + ⟨t⟩^{2−9δ}N_low_i
    Thm3,
    /// Σ E_i + ⟨t⟩^{−δ}W_i + ⟨t⟩^{1−δ}K_i
    Thm4,
}

impl std::str::FromStr for BootstrapMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "thm3" => Ok(BootstrapMode::Thm3),
            "thm4" => Ok(BootstrapMode::Thm4),
            _ => Err(Error::Config(format!("unknown bootstrap mode {s:?}"))),
        }
    }
}

#[inline]
pub fn japanese(t: f64) -> f64 {
    (1.0 + t * t).sqrt()
}

pub fn functional(row: &DiagnosticsRow, mode: BootstrapMode, delta: f64) -> f64 {
    let jt = japanese(row.t);
    row.comps
        .iter()
        .map(|c| match mode {
            BootstrapMode::Thm3 => c.e + jt.powf(1.5 - 2.0 * delta) * c.n_high + jt.powf(2.0 - 9.0 * delta) * c.n_low,
            BootstrapMode::Thm4 => c.e + jt.powf(-delta) * c.w + jt.powf(1.0 - delta) * c.k,
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapReport {
    pub mode: BootstrapMode,
    pub eps0: f64,
    pub delta: f64,
    /// ε₀^{3/4}
    pub bound: f64,
    pub sup: f64,
    /// bound / sup
    pub margin: f64,
    pub first_violation: Option<f64>,
    pub series: Vec<(f64, f64)>,
    /// scattering drifts of each component over the configured (early, late) pairs
    #[serde(default)]
    pub drifts: Vec<DriftPair>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftPair {
    pub component: usize,
    pub early: (f64, f64),
    pub late: (f64, f64),
    pub early_drift: f64,
    pub late_drift: f64,
}

impl DriftPair {
    pub fn decreases(&self) -> bool {
        self.late_drift < self.early_drift
    }
}

impl BootstrapReport {
    pub fn holds(&self) -> bool {
        self.first_violation.is_none()
    }
}

pub fn bootstrap_monitor(traj: &Trajectory, eps0: f64, delta: f64, mode: BootstrapMode, flags: Flags) -> Result<BootstrapReport> {
    if mode == BootstrapMode::Thm3 && !(flags.no_self_interaction && flags.separation_required) {
        return Err(Error::Precondition(
            "thm3 monitoring needs a run with no_self_interaction and separation_required".into(),
        ));
    }
    let bound = eps0.powf(0.75);
    let series: Vec<(f64, f64)> = traj.rows.iter().map(|r| (r.t, functional(r, mode, delta))).collect();
    let sup = series.iter().map(|p| p.1).fold(0.0, f64::max);
    let first_violation = series.iter().find(|p| p.1 > bound).map(|p| p.0);
    let margin = if sup == 0.0 { f64::INFINITY } else { bound / sup };
    Ok(BootstrapReport { mode, eps0, delta, bound, sup, margin, first_violation, series, drifts: Vec::new() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::diagnostics::ComponentDiagnostics;
    use crate::spectral::Grid;

    fn row(t: f64, v: f64) -> DiagnosticsRow {
        DiagnosticsRow {
            t,
            comps: vec![ComponentDiagnostics {
                e: v,
                k: v / t,
                w: v,
                n_high: v * v * v,
                n_low: v * v * v,
                cone: vec![],
                sup_grad: v,
                sup_inner: v,
            }],
        }
    }

    #[test]
    fn zero_data_holds_and_large_data_violates() {
        let flags = Flags { separation_required: true, no_self_interaction: true };
        let mut tr = Trajectory::new(Grid::new(8, 4.0).unwrap());
        for i in 1..10 {
            tr.push(row(i as f64, 0.0)).unwrap();
        }
        let r = bootstrap_monitor(&tr, 1e-3, 0.05, BootstrapMode::Thm3, flags).unwrap();
        assert!(r.holds());
        assert_eq!(r.sup, 0.0);
        let mut big = Trajectory::new(Grid::new(8, 4.0).unwrap());
        for i in 1..10 {
            big.push(row(i as f64, 0.5)).unwrap();
        }
        let r = bootstrap_monitor(&big, 0.5, 0.05, BootstrapMode::Thm3, flags).unwrap();
        assert_eq!(r.first_violation, Some(1.0));
        assert!(bootstrap_monitor(&big, 0.5, 0.05, BootstrapMode::Thm3, Flags::default()).is_err());
        assert!(bootstrap_monitor(&big, 0.5, 0.05, BootstrapMode::Thm4, Flags::default()).is_ok());
    }

    #[test]
    fn thm3_functional_is_linear_without_nonlinearity() {
        let mut a = row(3.0, 0.2);
        a.comps[0].n_high = 0.0;
        a.comps[0].n_low = 0.0;
        let mut b = a.clone();
        b.comps[0].e *= 3.0;
        let fa = functional(&a, BootstrapMode::Thm3, 0.05);
        assert_eq!(functional(&b, BootstrapMode::Thm3, 0.05), 3.0 * fa);
    }
}
