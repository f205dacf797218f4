//! TOML run configuration.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::bootstrap::BootstrapMode;
use crate::cutoffs::SweepConfig;
use crate::solver::{Term, DEFAULT_CONE_EXPONENT};
use crate::{Error, Result};

pub const SEED_ENV: &str = "ANISO_SEED";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridCfg {
    pub n: usize,
    #[serde(rename = "L")]
    pub l: f64,
}

impl Default for GridCfg {
    fn default() -> Self {
        GridCfg { n: 64, l: 40.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemCfg {
    pub m: usize,
    /// one (ε₁, ε₂, ε₃) per component
    pub eps: Vec<[f64; 3]>,
    #[serde(default)]
    pub nonlinearity: Vec<Term>,
    pub epsilon0: f64,
    #[serde(default = "default_cone_exponent")]
    pub cone_exponent: f64,
    #[serde(default)]
    pub no_self_interaction: bool,
    #[serde(default)]
    pub separation_required: bool,
    #[serde(default = "default_margin")]
    pub separation_margin: f64,
}

fn default_cone_exponent() -> f64 {
    DEFAULT_CONE_EXPONENT
}

fn default_margin() -> f64 {
    0.1
}

impl Default for SystemCfg {
    fn default() -> Self {
        SystemCfg {
            m: 1,
            eps: vec![[1.0; 3]],
            nonlinearity: Vec::new(),
            epsilon0: 1e-3,
            cone_exponent: DEFAULT_CONE_EXPONENT,
            no_self_interaction: false,
            separation_required: false,
            separation_margin: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunCfg {
    pub t0: f64,
    pub t_end: f64,
    pub dt: f64,
    pub output_every: usize,
    /// times at which half-wave profiles are kept for drift measurements
    #[serde(default)]
    pub profile_times: Vec<f64>,
}

impl Default for RunCfg {
    fn default() -> Self {
        RunCfg { t0: 1.0, t_end: 8.0, dt: 0.1, output_every: 5, profile_times: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsCfg {
    pub k_max: usize,
    pub delta: f64,
    pub cone_bins: usize,
    #[serde(default)]
    pub k_mid: Option<usize>,
    #[serde(default)]
    pub k_low: Option<usize>,
}

impl Default for DiagnosticsCfg {
    fn default() -> Self {
        DiagnosticsCfg { k_max: 4, delta: 0.05, cone_bins: 8, k_mid: None, k_low: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalize {
    /// Σ_i ‖∂Γ^{≤k_max}φ_i(t₀)‖ = ε₀
    Energy,
    /// Σ_i ‖∂Γ^{≤k_max}φ_i(t₀)‖ + ‖∂φ_i(t₀)‖_{L¹} = ε₀
    L1,
    /// data used as generated, times ε₀
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataCfg {
    pub sigma: f64,
    pub degree: u32,
    pub velocity: f64,
    pub normalize: Normalize,
    /// offsets of each component's packet centre
    #[serde(default)]
    pub centers: Vec<[f64; 3]>,
}

impl Default for DataCfg {
    fn default() -> Self {
        DataCfg { sigma: 1.0, degree: 1, velocity: 1.0, normalize: Normalize::Energy, centers: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecksCfg {
    /// bootstrap functional to monitor in `run`
    #[serde(default)]
    pub bootstrap: Option<BootstrapMode>,
    /// decay-fit window; the last octave when absent
    #[serde(default)]
    pub fit_window: Option<(f64, f64)>,
    /// "bounded" means ≤ this factor times the initial value
    #[serde(default = "default_bounded")]
    pub bounded_factor: f64,
    /// drift pairs (t1, t2) compared as drift(late) < drift(early)
    #[serde(default)]
    pub drift_pairs: Vec<[f64; 2]>,
}

fn default_bounded() -> f64 {
    10.0
}

impl Default for ChecksCfg {
    fn default() -> Self {
        ChecksCfg { bootstrap: None, fit_window: None, bounded_factor: 10.0, drift_pairs: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IdentitiesCfg {
    /// grid sizes for the refinement study
    pub resolutions: Vec<usize>,
    pub box_length: f64,
    pub t: f64,
    /// members of the weighted Böchner ensemble
    pub ensemble: usize,
    /// solutions and points per solution of the Sobolev ensemble
    pub sobolev_solutions: usize,
    pub sobolev_points: usize,
    /// time of the interior elliptic check
    pub interior_t: f64,
    /// scale exponent of the shell weights (the literal choice is −10)
    pub weight_scale: i32,
}

impl Default for IdentitiesCfg {
    fn default() -> Self {
        IdentitiesCfg {
            resolutions: vec![64, 128],
            box_length: 22.0,
            t: 4.0,
            ensemble: 20,
            sobolev_solutions: 10,
            sobolev_points: 5,
            interior_t: 8.0,
            weight_scale: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub grid: GridCfg,
    #[serde(default)]
    pub system: SystemCfg,
    #[serde(default)]
    pub run: RunCfg,
    #[serde(default)]
    pub diagnostics: DiagnosticsCfg,
    #[serde(default)]
    pub data: DataCfg,
    #[serde(default)]
    pub checks: ChecksCfg,
    #[serde(default)]
    pub identities: IdentitiesCfg,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        let cfg: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    /// Read a file and apply the seed override from the environment.
    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Config::parse(&text)?;
        if let Ok(s) = std::env::var(SEED_ENV) {
            cfg.seed = s.trim().parse().map_err(|_| Error::Config(format!("{SEED_ENV}={s:?} is not an integer")))?;
        }
        Ok(cfg)
    }

    pub fn check(&self) -> Result<()> {
        let s = &self.system;
        if s.m == 0 || s.eps.len() != s.m {
            return Err(Error::Config(format!("system.m = {} but {} speed triples", s.m, s.eps.len())));
        }
        if !(s.epsilon0 > 0.0) {
            return Err(Error::Config("system.epsilon0 must be positive".into()));
        }
        let r = &self.run;
        if r.t0 < 1.0 {
            return Err(Error::Config(format!("run.t0 = {} < 1", r.t0)));
        }
        if !(r.t_end >= r.t0) {
            return Err(Error::Config("run.t_end before run.t0".into()));
        }
        if !(r.dt > 0.0 && r.dt <= 0.1) {
            return Err(Error::Config(format!("run.dt = {} outside (0, 0.1]", r.dt)));
        }
        if !self.data.centers.is_empty() && self.data.centers.len() != s.m {
            return Err(Error::Config("data.centers needs one entry per component".into()));
        }
        Ok(())
    }

    /// sha256 of the canonical JSON form (after overrides).
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
seed = 3
[grid]
n = 32
L = 20.0
[system]
m = 2
eps = [[1.0, 1.0, 1.0], [0.5, 0.4, 0.3]]
epsilon0 = 1e-3
nonlinearity = [
  { target = 0, coeff = 1.0, factors = [{ c = 0, d = "t" }, { c = 1, d = "t" }, { c = 1, d = "x" }] },
]
[run]
t0 = 1.0
t_end = 4.0
dt = 0.1
output_every = 5
[diagnostics]
k_max = 2
delta = 0.05
cone_bins = 4
"#;

    #[test]
    fn parse_and_hash() {
        let c = Config::parse(SAMPLE).unwrap();
        assert_eq!(c.grid.n, 32);
        assert_eq!(c.system.nonlinearity.len(), 1);
        assert_eq!(c.system.cone_exponent, -2.0);
        let h1 = c.hash();
        let mut d = c.clone();
        d.seed = 4;
        assert_ne!(h1, d.hash());
        assert_eq!(h1, Config::parse(SAMPLE).unwrap().hash());
    }

    #[test]
    fn rejects_inconsistent() {
        let bad = SAMPLE.replace("m = 2", "m = 3");
        assert!(Config::parse(&bad).is_err());
        let bad = SAMPLE.replace("t0 = 1.0", "t0 = 0.5");
        assert!(Config::parse(&bad).is_err());
        assert!(Config::parse("[grid]\nn = 8\nL = 1.0\nbogus = 1\n").is_err());
    }
}
