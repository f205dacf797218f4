//! Measure of S_{k,l}(t,x) = {ξ : |1 + μ x·ξ/(t|ξ|)| ≤ 2^l, 2^{k−1} ≤ |ξ| ≤ 2^k}.
//!
//! The condition only sees c = cos∠(x, ξ), so the set is a shell times a polar cap or
//! band. The θ-interval is found in closed form; quadrature runs on that interval.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::*;
use crate::spectral::gauss_legendre;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSetSpec {
    pub t: f64,
    pub x: [f64; 3],
    pub k: i32,
    pub l: i32,
    pub mu: Sign,
}

impl PhaseSetSpec {
    /// t = 1, x = (β, 0, 0).
    pub fn from_beta(beta: f64, k: i32, l: i32, mu: Sign) -> Self {
        PhaseSetSpec { t: 1.0, x: [beta, 0.0, 0.0], k, l, mu }
    }

    pub fn beta(&self) -> f64 {
        (self.x[0] * self.x[0] + self.x[1] * self.x[1] + self.x[2] * self.x[2]).sqrt() / self.t.abs()
    }

    /// b in |1 + b cosθ| ≤ 2^l, θ measured from x.
    fn b(&self) -> f64 {
        self.mu.value() * self.t.signum() * self.beta()
    }

    pub fn shell_volume(&self) -> f64 {
        4.0 * PI / 3.0 * (8f64.powi(self.k) - 8f64.powi(self.k - 1))
    }
}

/// θ ∈ [0, π] for a given 1 − cosθ ∈ [0, 2], without cancellation near θ = 0.
fn theta_of(one_minus_c: f64) -> f64 {
    2.0 * (0.5 * one_minus_c.clamp(0.0, 2.0)).sqrt().asin()
}

/// The θ-set Θ = {θ ∈ [0, π] : |1 + b cosθ| ≤ 2^l} as a list of intervals.
pub fn theta_set(b: f64, l: i32) -> Vec<(f64, f64)> {
    let e = 2f64.powi(l);
    if b == 0.0 {
        return if e >= 1.0 { vec![(0.0, PI)] } else { vec![] };
    }
    // b c ∈ [−1 − e, −1 + e]; write the bounds as 1 − c to keep small angles accurate
    let omc_a = (b + 1.0 + e) / b;
    let omc_b = (b + 1.0 - e) / b;
    let (lo, hi) = if omc_a <= omc_b { (omc_a, omc_b) } else { (omc_b, omc_a) };
    if hi < 0.0 || lo > 2.0 {
        return vec![];
    }
    let (t0, t1) = (theta_of(lo), theta_of(hi));
    if t1 > t0 {
        vec![(t0, t1)]
    } else {
        vec![]
    }
}

/// |S_{k,l}| = ∫ r² dr · 2π ∫_Θ sinθ dθ
pub fn skl_measure_quad(spec: &PhaseSetSpec, radial_nodes: usize, angular_nodes: usize) -> Result<f64> {
    if spec.t == 0.0 {
        return Err(Error::Precondition("t = 0".into()));
    }
    if radial_nodes < 64 || angular_nodes < 64 {
        return Err(Error::Precondition("quadrature needs at least 64 nodes".into()));
    }
    let (ra, rb) = (2f64.powi(spec.k - 1), 2f64.powi(spec.k));
    let (rx, rw) = gauss_legendre(radial_nodes);
    let radial: f64 = rx
        .iter()
        .zip(&rw)
        .map(|(&x, &w)| {
            let r = 0.5 * (rb - ra) * x + 0.5 * (ra + rb);
            0.5 * (rb - ra) * w * r * r
        })
        .sum();
    let (ax, aw) = gauss_legendre(angular_nodes);
    let mut angular = 0.0;
    for (t0, t1) in theta_set(spec.b(), spec.l) {
        for (&x, &w) in ax.iter().zip(&aw) {
            let th = 0.5 * (t1 - t0) * x + 0.5 * (t0 + t1);
            angular += 0.5 * (t1 - t0) * w * th.sin();
        }
    }
    Ok(radial * 2.0 * PI * angular)
}

fn sample_in_shell(rng: &mut ChaCha8Rng, ra: f64, rb: f64) -> [f64; 3] {
    loop {
        let p = [rng.gen_range(-rb..rb), rng.gen_range(-rb..rb), rng.gen_range(-rb..rb)];
        let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        if r >= ra && r <= rb {
            return p;
        }
    }
}

fn mc_with_rng(spec: &PhaseSetSpec, samples: usize, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let (ra, rb) = (2f64.powi(spec.k - 1), 2f64.powi(spec.k));
    let e = 2f64.powi(spec.l);
    let mut hits = 0usize;
    for _ in 0..samples {
        let xi = sample_in_shell(rng, ra, rb);
        let r = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
        let dotp = spec.x[0] * xi[0] + spec.x[1] * xi[1] + spec.x[2] * xi[2];
        if (1.0 + spec.mu.value() * dotp / (spec.t * r)).abs() <= e {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    let v = spec.shell_volume();
    (v * p, v * (p * (1.0 - p) / samples as f64).sqrt())
}

/// Rejection-sampled estimate and its standard error.
pub fn skl_measure_mc(spec: &PhaseSetSpec, samples: usize, seed: u64) -> Result<(f64, f64)> {
    if spec.t == 0.0 {
        return Err(Error::Precondition("t = 0".into()));
    }
    if samples < 100_000 {
        return Err(Error::Precondition("Monte Carlo needs at least 1e5 samples".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(mc_with_rng(spec, samples, &mut rng))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub k_min: i32,
    pub k_max: i32,
    pub l_min: i32,
    pub l_max: i32,
    pub betas: Vec<f64>,
    #[serde(default = "both_signs")]
    pub mus: Vec<Sign>,
    #[serde(default = "default_nodes")]
    pub radial_nodes: usize,
    #[serde(default = "default_nodes")]
    pub angular_nodes: usize,
    /// Monte-Carlo samples per cell; 0 skips the oracle column
    #[serde(default)]
    pub mc_samples: usize,
    #[serde(default)]
    pub seed: u64,
}

fn both_signs() -> Vec<Sign> {
    vec![Sign::Plus, Sign::Minus]
}

fn default_nodes() -> usize {
    64
}

impl SweepConfig {
    pub fn lemma_default() -> SweepConfig {
        SweepConfig {
            k_min: -6,
            k_max: 6,
            l_min: -40,
            l_max: 2,
            betas: vec![0.0, 0.3, 0.5, 0.9, 1.0, 1.5, 10.0],
            mus: both_signs(),
            radial_nodes: 64,
            angular_nodes: 64,
            mc_samples: 0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub k: i32,
    pub l: i32,
    pub beta: f64,
    pub mu: Sign,
    pub measure_quad: f64,
    pub measure_mc: Option<f64>,
    pub mc_stderr: Option<f64>,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub max_ratio: f64,
}

impl SweepReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,l,beta,mu,measure_quad,measure_mc,mc_stderr,ratio\n");
        for r in &self.rows {
            let opt = |v: Option<f64>| v.map_or(String::new(), |v| format!("{v:.12e}"));
            s.push_str(&format!(
                "{},{},{},{},{:.12e},{},{},{:.12e}\n",
                r.k,
                r.l,
                r.beta,
                r.mu.symbol(),
                r.measure_quad,
                opt(r.measure_mc),
                opt(r.mc_stderr),
                r.ratio
            ));
        }
        s
    }
}

/// Sup of |S_{k,l}| / 2^{3k+l} over the configured cells. Monte-Carlo cells draw
/// from stream `cell index` of the configured seed.
pub fn measure_lemma_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    let mut cells = Vec::new();
    for k in cfg.k_min..=cfg.k_max {
        for l in cfg.l_min..=cfg.l_max {
            for &beta in &cfg.betas {
                for &mu in &cfg.mus {
                    cells.push((k, l, beta, mu));
                }
            }
        }
    }
    let rows: Vec<Result<SweepRow>> = cells
        .par_iter()
        .enumerate()
        .map(|(i, &(k, l, beta, mu))| {
            let spec = PhaseSetSpec::from_beta(beta, k, l, mu);
            let q = skl_measure_quad(&spec, cfg.radial_nodes, cfg.angular_nodes)?;
            let (mc, se) = if cfg.mc_samples > 0 {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(i as u64);
                let (m, s) = mc_with_rng(&spec, cfg.mc_samples, &mut rng);
                (Some(m), Some(s))
            } else {
                (None, None)
            };
            Ok(SweepRow { k, l, beta, mu, measure_quad: q, measure_mc: mc, mc_stderr: se, ratio: q / 2f64.powi(3 * k + l) })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let max_ratio = rows.iter().fold(0.0f64, |m, r| m.max(r.ratio));
    Ok(SweepReport { rows, max_ratio })
}
