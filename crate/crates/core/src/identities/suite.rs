//! The verification suite: fixed exactness checks, the pinned calibration ensembles and
//! the constants measured on them.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::bochner::{bochner_integrated, first_order_integrated, weighted_bochner_terms};
use super::inequalities::{exterior_energy_check, interior_elliptic_check, sobolev_embedding_check, ExteriorSample, Measurement};
use super::report::IdentityReport;
use super::weights::WeightSpec;
use crate::cutoffs::{
    branch_jet, chi_jet, chi_range, chi_scaled, chi_smoothness_sup, measure_lemma_sweep, skl_measure_mc, skl_measure_quad,
    Branch, PhaseSetSpec, Sign, SweepConfig, SweepReport,
};
use crate::harness::constants::{CalibratedConstants, ConstantCheck, TOLERANCE};
use crate::harness::{Config, Verdict};
use crate::harness::config::IdentitiesCfg;
use crate::par::*;
use crate::solver::{exact_linear_step, linear_exactness, seeded_packet, PacketSpec, SpeedTriple, Stepper, SystemState};
use crate::spectral::{gradient, laplacian, Grid, ScalarField, SplitQuadrature};
use crate::vectorfield::{commutator_residual, main_formula_residual, populate_lattice, TimeJet};
use crate::{Error, Result};

/// δ used wherever a small positive δ appears.
pub const DELTA: f64 = 0.05;

fn r2_of(x: [f64; 3]) -> f64 {
    x[0] * x[0] + x[1] * x[1] + x[2] * x[2]
}

/// A report whose value must stay below `tol`.
fn residual_report(check: &str, resolution: usize, value: f64, tol: f64) -> IdentityReport {
    IdentityReport {
        check: check.into(),
        resolution,
        lhs: value,
        rhs: 0.0,
        residual: value,
        constant: None,
        tolerance_used: tol,
        pass: value.is_finite() && value <= tol,
    }
}

// ---------------------------------------------------------------- cutoffs

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffExactness {
    /// largest mismatch of value, χ′ or χ″ between adjacent branches
    pub junction: f64,
    /// |χ(−2) − 1/4| from either branch
    pub quarter: f64,
    /// largest |Σ_{k1..k2} χ_k − (χ_{≤k2} − χ_{≤k1−1})|
    pub telescoping: f64,
}

impl CutoffExactness {
    pub fn pass(&self) -> bool {
        self.junction <= 1e-10 && self.quarter == 0.0 && self.telescoping <= 1e-12
    }
}

pub fn cutoff_exactness() -> CutoffExactness {
    let pairs = [(-3.0, Branch::Zero, Branch::Rise), (-2.0, Branch::Rise, Branch::Shoulder), (-1.0, Branch::Shoulder, Branch::One)];
    let mut junction = 0.0f64;
    for (x, a, b) in pairs {
        let (va, da, sa) = branch_jet(a, x);
        let (vb, db, sb) = branch_jet(b, x);
        junction = junction.max((va - vb).abs()).max((da - db).abs()).max((sa - sb).abs());
    }
    // at 0 the left branch meets its own reflection
    let (v0, d0, s0) = chi_jet(0.0);
    let (vr, dr, sr) = branch_jet(Branch::One, 0.0);
    junction = junction.max((v0 - vr).abs()).max((d0 + dr).abs()).max((s0 - sr).abs());
    let quarter = (branch_jet(Branch::Rise, -2.0).0 - 0.25).abs().max((branch_jet(Branch::Shoulder, -2.0).0 - 0.25).abs());
    let mut telescoping = 0.0f64;
    for k1 in -6..=2 {
        for k2 in k1..=6 {
            for i in 0..=2000 {
                let x = 3.0 * 2f64.powi(k2 + 1) * i as f64 / 2000.0;
                let d = chi_range(k1, k2, x) - (chi_scaled(k2, x) - chi_scaled(k1 - 1, x));
                telescoping = telescoping.max(d.abs());
            }
        }
    }
    CutoffExactness { junction, quarter, telescoping }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessStability {
    pub coarse: f64,
    pub fine: f64,
}

impl SmoothnessStability {
    pub fn relative_change(&self) -> f64 {
        (self.fine - self.coarse).abs() / self.fine
    }

    pub fn pass(&self) -> bool {
        self.fine.is_finite() && self.relative_change() <= 0.01
    }
}

/// The smoothness constant at 10⁴ and 10⁶ samples.
pub fn smoothness_stability() -> SmoothnessStability {
    SmoothnessStability { coarse: chi_smoothness_sup(10_001), fine: chi_smoothness_sup(1_000_001) }
}

// ---------------------------------------------------------------- operators

/// φ = exp(−|x|² − (t − 2)²) with its first three time derivatives.
pub fn gaussian_time_jet(grid: Grid, t: f64) -> TimeJet {
    let s = t - 2.0;
    let e = (-s * s).exp();
    let gt = [e, -2.0 * s * e, (4.0 * s * s - 2.0) * e, (-8.0 * s * s * s + 12.0 * s) * e];
    let base = ScalarField::from_fn(grid, t, |x| (-r2_of(x)).exp());
    TimeJet { d: gt.map(|c| base.scale(c)) }
}

pub const COMMUTATION_SPEEDS: [[f64; 3]; 2] = [[1.0, 1.0, 1.0], [1.0, 4.0, 9.0]];

/// Relative residual of □S = (S + 2)□ on the analytic Gaussian, per speed triple.
pub fn commutation_reports(n: usize, box_length: f64, t: f64) -> Result<Vec<IdentityReport>> {
    let grid = Grid::new(n, box_length)?;
    let jet = gaussian_time_jet(grid, t);
    Ok(COMMUTATION_SPEEDS.iter().map(|&eps| residual_report("commutation", n, commutator_residual(&jet, eps), 1e-8)).collect())
}

/// ‖Lφ − F[φ] − □φ‖/‖Lφ‖ along an evolved free solution with compact Gaussian data.
pub fn operator_decomposition_reports(n: usize, box_length: f64, times: &[f64]) -> Result<Vec<IdentityReport>> {
    let grid = Grid::new(n, box_length)?;
    let a = ScalarField::from_fn(grid, 1.0, |x| (-r2_of(x) / 0.8).exp());
    let b = a.map_with_x(|x, v| (x[0] - x[1]) * v);
    let lat = populate_lattice(&a, &b, [1.0; 3], 2)?;
    let speeds = [SpeedTriple::isotropic()];
    let mut stepper = Stepper::new(grid, &speeds, None, 0.1)?;
    let mut state = SystemState::from_lattices(&[lat])?;
    let mut out = Vec::new();
    for &t in times {
        while state.time() < t - 1e-9 {
            stepper.step(&mut state)?;
        }
        let lat = state.lattice(0, &speeds[0])?;
        out.push(residual_report("operator_decomposition", n, main_formula_residual(&lat)?, 1e-6));
    }
    Ok(out)
}

// ---------------------------------------------------------------- Böchner refinement

/// Relative residual tolerance of the integrated identity at resolution n.
pub fn bochner_tolerance(n: usize) -> f64 {
    if n <= 64 {
        1e-6
    } else {
        1e-8
    }
}

/// Residuals at or below this are treated as converged when estimating the order.
pub const ROUNDOFF_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Refinement {
    pub reports: Vec<IdentityReport>,
    /// observed orders between consecutive resolutions
    pub orders: Vec<f64>,
}

impl Refinement {
    pub fn finest(&self) -> f64 {
        self.reports.last().map_or(f64::NAN, |r| r.relative())
    }

    pub fn pass(&self) -> bool {
        let ok_orders = self.orders.iter().zip(self.reports.windows(2)).all(|(&p, w)| p >= 4.0 || w[1].relative() <= ROUNDOFF_FLOOR);
        !self.reports.is_empty() && self.reports.iter().all(|r| r.pass) && ok_orders
    }
}

/// The integrated second-order identity on x₁e^{−|x|²} at each resolution.
pub fn bochner_refinement(resolutions: &[usize], box_length: f64, t: f64) -> Result<Refinement> {
    let quad = SplitQuadrature::default();
    let mut reports = Vec::new();
    for &n in resolutions {
        let grid = Grid::new(n, box_length)?;
        let phi = ScalarField::from_fn(grid, t, |x| x[0] * (-r2_of(x)).exp());
        reports.push(bochner_integrated(&phi, &quad, bochner_tolerance(n))?);
    }
    let orders = reports
        .windows(2)
        .map(|w| (w[0].relative() / w[1].relative()).ln() / (w[1].resolution as f64 / w[0].resolution as f64).ln())
        .collect();
    Ok(Refinement { reports, orders })
}

/// The first-order identity on a radial Gaussian at each resolution.
pub fn first_order_reports(resolutions: &[usize], box_length: f64, t: f64) -> Result<Vec<IdentityReport>> {
    let quad = SplitQuadrature::default();
    resolutions
        .iter()
        .map(|&n| {
            let grid = Grid::new(n, box_length)?;
            let phi = ScalarField::from_fn(grid, t, |x| (-r2_of(x)).exp());
            first_order_integrated(&phi, &quad, 1e-8)
        })
        .collect()
}

// ---------------------------------------------------------------- ensembles

/// Grid and packet width shared by the weighted Böchner and Sobolev ensembles.
const FREE_GRID: (usize, f64) = (56, 20.0);
const FREE_SIGMA: f64 = 1.6;
/// Exterior ensemble: annulus data of width 1 around radius 3.
const EXTERIOR_GRID: (usize, f64) = (96, 32.0);
const EXTERIOR_TIMES: usize = 8;
const EXTERIOR_MEMBERS: usize = 3;
/// Interior ensemble: packets centred at distance t − 1, so the front crosses the ball at t.
const INTERIOR_GRID: (usize, f64) = (112, 40.0);
const INTERIOR_SIGMA: f64 = 1.6;
const INTERIOR_MEMBERS: usize = 5;
const INTERIOR_SCALE: i32 = -5;
const INTERIOR_WEIGHT_SCALE: i32 = -20;
/// Stream offsets keeping the ensembles independent under one seed.
const STREAM_WB: u64 = 0;
const STREAM_SOB: u64 = 1 << 16;
const STREAM_EXT: u64 = 2 << 16;
const STREAM_INT: u64 = 3 << 16;

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    r.set_stream(stream);
    r
}

fn unit_vector(r: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v = [r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)];
        let n = r2_of(v).sqrt();
        if n > 0.1 && n <= 1.0 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// A free isotropic solution launched at t = 1 from a seeded packet and propagated to t.
/// Member 0 of every stream block is the radial Gaussian.
pub fn free_member(grid: Grid, t: f64, sigma: f64, seed: u64, stream: u64) -> (ScalarField, ScalarField) {
    let mut r = rng(seed, stream);
    let center = [r.gen_range(-0.5..0.5), r.gen_range(-0.5..0.5), r.gen_range(-0.5..0.5)];
    member_at(grid, t, sigma, seed, stream, center)
}

fn member_at(grid: Grid, t: f64, sigma: f64, seed: u64, stream: u64, center: [f64; 3]) -> (ScalarField, ScalarField) {
    let mut r = rng(seed, stream ^ 0x4000);
    let radial = stream & 0xffff == 0;
    let center = if radial { [0.0; 3] } else { center };
    let spec = PacketSpec { sigma, center, degree: if radial { 0 } else { 2 }, velocity: r.gen_range(0.0..1.0) };
    let (a, b) = seeded_packet(grid, 1.0, &spec, seed, stream);
    if t == 1.0 {
        return (a, b);
    }
    exact_linear_step(&a, &b, t - 1.0, &SpeedTriple::isotropic())
}

/// One weighted Böchner evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedSample {
    pub member: usize,
    pub weight: String,
    pub measurement: Measurement,
}

pub fn weighted_bochner_ensemble(cfg: &IdentitiesCfg, seed: u64) -> Result<Vec<WeightedSample>> {
    let grid = Grid::new(FREE_GRID.0, FREE_GRID.1)?;
    let t = cfg.t;
    let per: Result<Vec<Vec<WeightedSample>>> = (0..cfg.ensemble)
        .into_par_iter()
        .map(|i| {
            let (phi, phi_t) = free_member(grid, t, FREE_SIGMA, seed, STREAM_WB + i as u64);
            let lat = populate_lattice(&phi, &phi_t, [1.0; 3], 2)?;
            let mut r = rng(seed, STREAM_WB + i as u64 + 0x8000);
            let dir = unit_vector(&mut r);
            let r0 = r.gen_range(0.5 * t..t + 1.0);
            let x0 = [r0 * dir[0], r0 * dir[1], r0 * dir[2]];
            WeightSpec::paper_pair(x0, INTERIOR_WEIGHT_SCALE, cfg.weight_scale)
                .iter()
                .map(|w| {
                    let terms = weighted_bochner_terms(&lat, None, w, None)?;
                    Ok(WeightedSample { member: i, weight: w.label(), measurement: Measurement { lhs: terms.lhs, rhs: terms.rhs() } })
                })
                .collect()
        })
        .collect();
    Ok(per?.into_iter().flatten().collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SobolevSample {
    pub member: usize,
    pub x0: [f64; 3],
    pub measurement: Measurement,
}

/// Radii of the Sobolev points, as fractions of t plus offsets: deep inside, mid, near and past the cone.
fn sobolev_radius(j: usize, t: f64) -> f64 {
    const TABLE: [(f64, f64); 5] = [(1.0 / 16.0, 0.0), (0.25, 0.0), (0.5, 0.0), (1.0, -0.5), (1.0, 1.0)];
    let (a, b) = TABLE[j % TABLE.len()];
    a * t + b
}

pub fn sobolev_ensemble(cfg: &IdentitiesCfg, seed: u64) -> Result<Vec<SobolevSample>> {
    let grid = Grid::new(FREE_GRID.0, FREE_GRID.1)?;
    let t = cfg.t;
    let per: Result<Vec<Vec<SobolevSample>>> = (0..cfg.sobolev_solutions)
        .into_par_iter()
        .map(|i| {
            let stream = STREAM_SOB + i as u64;
            let (phi, _) = free_member(grid, t, FREE_SIGMA, seed, stream);
            let mut r = rng(seed, stream + 0x8000);
            (0..cfg.sobolev_points)
                .map(|j| {
                    let dir = unit_vector(&mut r);
                    let r0 = sobolev_radius(j, t);
                    let x0 = [r0 * dir[0], r0 * dir[1], r0 * dir[2]];
                    let measurement = sobolev_embedding_check(&phi, x0, DELTA, cfg.weight_scale, None)?;
                    Ok(SobolevSample { member: i, x0, measurement })
                })
                .collect()
        })
        .collect();
    Ok(per?.into_iter().flatten().collect())
}

/// A unit bump of width 1 centred on the cone |x₀| = t.
pub fn sobolev_sharpness_probe(cfg: &IdentitiesCfg) -> Result<Measurement> {
    let grid = Grid::new(FREE_GRID.0, FREE_GRID.1)?;
    let t = cfg.t;
    let x0 = [t, 0.0, 0.0];
    let phi = ScalarField::from_fn(grid, t, |x| (-r2_of([x[0] - x0[0], x[1], x[2]])).exp());
    sobolev_embedding_check(&phi, x0, DELTA, cfg.weight_scale, None)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExteriorRecord {
    pub member: usize,
    pub forced: bool,
    pub t: f64,
    pub measurement: Measurement,
}

/// Annulus data (radius 3, width 1) times a seeded linear factor, sampled at t = 1..8.
fn exterior_free(grid: Grid, seed: u64, member: usize) -> Vec<ExteriorSample> {
    let mut r = rng(seed, STREAM_EXT + member as u64);
    let a = [r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)];
    let v = r.gen_range(-1.0..1.0);
    let phi = ScalarField::from_fn(grid, 1.0, |x| {
        let rr = r2_of(x).sqrt();
        (-(rr - 3.0).powi(2)).exp() * (1.0 + (a[0] * x[0] + a[1] * x[1] + a[2] * x[2]) / 3.0)
    });
    let phi_t = phi.scale(v);
    let iso = SpeedTriple::isotropic();
    let mut out = vec![ExteriorSample { phi, phi_t, forcing: None }];
    for _ in 1..EXTERIOR_TIMES {
        let last = out.last().expect("non-empty");
        let (p, q) = exact_linear_step(&last.phi, &last.phi_t, 1.0, &iso);
        out.push(ExteriorSample { phi: p, phi_t: q, forcing: None });
    }
    out
}

/// φ = cos(t)h with h a unit bump at (9, 0, 0); □φ = cos(t)(h + Δh) lives outside the cone for t ≤ 8.
fn exterior_forced(grid: Grid) -> Vec<ExteriorSample> {
    let h = ScalarField::from_fn(grid, 1.0, |x| (-r2_of([x[0] - 9.0, x[1], x[2]])).exp());
    let hl = h.axpy(1.0, &laplacian(&h));
    (0..EXTERIOR_TIMES)
        .map(|k| {
            let t = 1.0 + k as f64;
            let (c, s) = (t.cos(), t.sin());
            ExteriorSample {
                phi: h.scale(c).with_time(t),
                phi_t: h.scale(-s).with_time(t),
                forcing: Some((hl.scale(c).with_time(t), hl.scale(-s).with_time(t))),
            }
        })
        .collect()
}

pub fn exterior_ensemble(seed: u64) -> Result<Vec<ExteriorRecord>> {
    let grid = Grid::new(EXTERIOR_GRID.0, EXTERIOR_GRID.1)?;
    let mut out = Vec::new();
    for m in 0..=EXTERIOR_MEMBERS {
        let forced = m == EXTERIOR_MEMBERS;
        let samples = if forced { exterior_forced(grid) } else { exterior_free(grid, seed, m) };
        for (t, measurement) in exterior_energy_check(&samples)? {
            out.push(ExteriorRecord { member: m, forced, t, measurement });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteriorRecord {
    pub member: usize,
    /// "phi" or "d1phi"
    pub field: String,
    pub measurement: Measurement,
}

/// Evolved compact-data solutions at `interior_t` whose front passes the origin then;
/// u = φ and u = ∂₁φ.
pub fn interior_ensemble(cfg: &IdentitiesCfg, seed: u64) -> Result<Vec<InteriorRecord>> {
    let grid = Grid::new(INTERIOR_GRID.0, INTERIOR_GRID.1)?;
    let t = cfg.interior_t;
    let per: Result<Vec<Vec<InteriorRecord>>> = (0..INTERIOR_MEMBERS)
        .into_par_iter()
        .map(|i| {
            let stream = STREAM_INT + 1 + i as u64;
            let mut r = rng(seed, stream + 0x8000);
            let d = unit_vector(&mut r);
            let c = [(t - 1.0) * d[0], (t - 1.0) * d[1], (t - 1.0) * d[2]];
            let (phi, phi_t) = member_at(grid, t, INTERIOR_SIGMA, seed, stream, c);
            let d1 = (gradient(&phi)[0].clone(), gradient(&phi_t)[0].clone());
            [("phi", (phi, phi_t)), ("d1phi", d1)]
                .into_iter()
                .map(|(name, (u, u_t))| {
                    let lat = populate_lattice(&u, &u_t, [1.0; 3], 1)?;
                    let measurement = interior_elliptic_check(&lat, None, INTERIOR_SCALE)?;
                    Ok(InteriorRecord { member: i, field: name.into(), measurement })
                })
                .collect()
        })
        .collect();
    Ok(per?.into_iter().flatten().collect())
}

/// All four inequality ensembles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityEnsembles {
    pub weighted: Vec<WeightedSample>,
    pub sobolev: Vec<SobolevSample>,
    pub exterior: Vec<ExteriorRecord>,
    pub interior: Vec<InteriorRecord>,
}

fn max_ratio<'a>(ms: impl Iterator<Item = &'a Measurement>) -> f64 {
    ms.map(|m| m.ratio()).fold(0.0, f64::max)
}

impl InequalityEnsembles {
    pub fn measure(cfg: &IdentitiesCfg, seed: u64) -> Result<InequalityEnsembles> {
        Ok(InequalityEnsembles {
            weighted: weighted_bochner_ensemble(cfg, seed)?,
            sobolev: sobolev_ensemble(cfg, seed)?,
            exterior: exterior_ensemble(seed)?,
            interior: interior_ensemble(cfg, seed)?,
        })
    }

    /// Sup of lhs/rhs per constant name.
    pub fn constants(&self) -> BTreeMap<String, f64> {
        let mut c = BTreeMap::new();
        c.insert("C_wb".to_string(), max_ratio(self.weighted.iter().map(|s| &s.measurement)));
        c.insert("C_sob".to_string(), max_ratio(self.sobolev.iter().map(|s| &s.measurement)));
        c.insert("C_ext".to_string(), max_ratio(self.exterior.iter().map(|s| &s.measurement)));
        c.insert("C_int".to_string(), max_ratio(self.interior.iter().map(|s| &s.measurement)));
        c
    }

    /// One inequality report per sample against the stored constants.
    pub fn reports(&self, stored: &CalibratedConstants, resolution_of: impl Fn(&str) -> usize) -> Result<Vec<IdentityReport>> {
        let tol = TOLERANCE - 1.0;
        let mut out = Vec::new();
        let mut push = |check: &str, name: &str, m: &Measurement| -> Result<()> {
            out.push(m.report(check, resolution_of(check), stored.get(name)?, tol));
            Ok(())
        };
        for s in &self.weighted {
            push("weighted_bochner", "C_wb", &s.measurement)?;
        }
        for s in &self.sobolev {
            push("sobolev_embedding", "C_sob", &s.measurement)?;
        }
        for s in &self.exterior {
            push("exterior_energy", "C_ext", &s.measurement)?;
        }
        for s in &self.interior {
            push("interior_elliptic", "C_int", &s.measurement)?;
        }
        Ok(out)
    }
}

fn ensemble_resolution(check: &str) -> usize {
    match check {
        "exterior_energy" => EXTERIOR_GRID.0,
        "interior_elliptic" => INTERIOR_GRID.0,
        _ => FREE_GRID.0,
    }
}

// ---------------------------------------------------------------- measure lemma

pub const MC_SPECS: usize = 50;
pub const MC_SAMPLES: usize = 400_000;
/// Monte-Carlo cells are drawn from l ≥ this, where the set is hit often enough to estimate.
pub const MC_L_MIN: i32 = -8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureCheck {
    pub max_ratio: f64,
    /// worst |mc − quad| / (3σ + one-hit resolution) over the Monte-Carlo cells
    pub mc_worst: f64,
    pub mc_cells: usize,
    /// |S| for β = 1, μ = −, k = 0, l = 0 minus 7π/12
    pub closed_form_error: f64,
    pub constant: ConstantCheck,
}

impl MeasureCheck {
    pub fn pass(&self) -> bool {
        self.max_ratio.is_finite() && self.mc_worst <= 1.0 && self.closed_form_error <= 1e-4 && self.constant.pass
    }
}

/// The sweep with Monte-Carlo columns filled for `MC_SPECS` seeded cells.
pub fn measure_sweep_with_mc(cfg: &SweepConfig, seed: u64) -> Result<(SweepReport, f64, usize)> {
    let mut plain = cfg.clone();
    plain.mc_samples = 0;
    let mut report = measure_lemma_sweep(&plain)?;
    let eligible: Vec<usize> = (0..report.rows.len()).filter(|&i| report.rows[i].l >= MC_L_MIN).collect();
    if eligible.is_empty() {
        return Ok((report, 0.0, 0));
    }
    let mut r = rng(seed, 0xface);
    let mut picked: Vec<usize> = Vec::new();
    while picked.len() < MC_SPECS.min(eligible.len()) {
        let c = eligible[r.gen_range(0..eligible.len())];
        if !picked.contains(&c) {
            picked.push(c);
        }
    }
    let results: Result<Vec<(usize, f64, f64, f64)>> = picked
        .par_iter()
        .enumerate()
        .map(|(j, &i)| {
            let row = &report.rows[i];
            let spec = PhaseSetSpec::from_beta(row.beta, row.k, row.l, row.mu);
            let (m, se) = skl_measure_mc(&spec, MC_SAMPLES, seed.wrapping_add(j as u64))?;
            let floor = spec.shell_volume() / MC_SAMPLES as f64;
            Ok((i, m, se, (m - row.measure_quad).abs() / (3.0 * se + floor)))
        })
        .collect();
    let mut worst = 0.0f64;
    for (i, m, se, z) in results? {
        report.rows[i].measure_mc = Some(m);
        report.rows[i].mc_stderr = Some(se);
        worst = worst.max(z);
    }
    Ok((report, worst, picked.len()))
}

pub fn measure_lemma_check(cfg: &SweepConfig, seed: u64, stored: &CalibratedConstants) -> Result<(SweepReport, MeasureCheck)> {
    let (report, mc_worst, mc_cells) = measure_sweep_with_mc(cfg, seed)?;
    let half = PhaseSetSpec::from_beta(1.0, 0, 0, Sign::Minus);
    let closed = skl_measure_quad(&half, cfg.radial_nodes, cfg.angular_nodes)?;
    let closed_form_error = (closed - 7.0 * std::f64::consts::PI / 12.0).abs();
    let constant = stored.check("C_meas", report.max_ratio)?;
    let check = MeasureCheck { max_ratio: report.max_ratio, mc_worst, mc_cells, closed_form_error, constant };
    Ok((report, check))
}

// ---------------------------------------------------------------- calibration

/// Measure every calibrated constant on the pinned ensembles; the version is one past `previous`.
pub fn calibrate(cfg: &Config, previous: &CalibratedConstants) -> Result<CalibratedConstants> {
    let ens = InequalityEnsembles::measure(&cfg.identities, cfg.seed)?;
    let mut constants = ens.constants();
    let sweep = cfg.sweep.clone().unwrap_or_else(SweepConfig::lemma_default);
    constants.insert("C_meas".into(), measure_lemma_sweep(&SweepConfig { mc_samples: 0, ..sweep })?.max_ratio);
    constants.insert("C_chi".into(), chi_smoothness_sup(1_000_001));
    let id = &cfg.identities;
    let mut provenance = BTreeMap::new();
    let mut note = |k: &str, v: String| {
        provenance.insert(k.to_string(), v);
    };
    note(
        "C_wb",
        format!(
            "max lhs/rhs over {} free solutions at t = {} on {}^3/{} with weights r^4 chi^2_(>=-20)(r/t) and chi_(<={})((r-|x0|)/<t-|x0|>) r^4",
            id.ensemble, id.t, FREE_GRID.0, FREE_GRID.1, id.weight_scale
        ),
    );
    note("C_sob", format!("max ratio over {} solutions x {} points at t = {}, delta = {DELTA}", id.sobolev_solutions, id.sobolev_points, id.t));
    note("C_ext", format!("max ratio over {EXTERIOR_MEMBERS} annulus solutions and one exterior-forced field, t = 1..{EXTERIOR_TIMES} on {}^3/{}", EXTERIOR_GRID.0, EXTERIOR_GRID.1));
    note("C_int", format!("max ratio over {INTERIOR_MEMBERS} solutions (u = phi, d1 phi) launched at distance t - 1, evaluated at t = {} with chi_(<={INTERIOR_SCALE})(r/t)", id.interior_t));
    note("C_meas", "max |S_kl|/2^(3k+l) over the configured sweep".into());
    note("C_chi", "sup (chi'^2 + chi''^2)/chi on [-3, 3] with 1e6 samples".into());
    Ok(CalibratedConstants { version: previous.version + 1, seed: cfg.seed, constants, provenance })
}

// ---------------------------------------------------------------- verify-identities

/// Resolution and box of the fixed commutation and decomposition checks.
pub const OPERATOR_GRID: (usize, f64) = (64, 16.0);
pub const DECOMPOSITION_TIMES: [f64; 2] = [2.0, 4.0];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteOutput {
    pub reports: Vec<IdentityReport>,
    pub constants: Vec<ConstantCheck>,
    pub verdict: Verdict,
}

fn worst(reports: &[IdentityReport]) -> f64 {
    reports.iter().map(|r| r.residual).fold(0.0, f64::max)
}

/// Every identity and inequality check; fills the cutoff, operator, Böchner,
/// linear-exactness and calibrated-inequality verdicts.
pub fn verify_identities(cfg: &Config, stored: &CalibratedConstants) -> Result<SuiteOutput> {
    let id = &cfg.identities;
    if id.resolutions.is_empty() {
        return Err(Error::Config("identities.resolutions is empty".into()));
    }
    let mut verdict = Verdict::default();
    let mut reports = Vec::new();
    let mut constants = Vec::new();

    let cut = cutoff_exactness();
    reports.push(residual_report("cutoff_junctions", 0, cut.junction, 1e-10));
    reports.push(residual_report("cutoff_quarter", 0, cut.quarter, 0.0));
    reports.push(residual_report("cutoff_telescoping", 0, cut.telescoping, 1e-12));
    verdict.set("cutoff_exactness", cut.pass(), cut.junction.max(cut.telescoping), 1e-10);

    let sm = smoothness_stability();
    let chi_check = stored.check("C_chi", sm.fine)?;
    reports.push(residual_report("smoothness_stability", 1_000_001, sm.relative_change(), 0.01));
    verdict.set("smoothness_constant", sm.pass() && chi_check.pass, sm.relative_change(), 0.01);
    constants.push(chi_check);

    let comm = commutation_reports(OPERATOR_GRID.0, OPERATOR_GRID.1, 2.0)?;
    verdict.set("commutation", comm.iter().all(|r| r.pass), worst(&comm), 1e-8);
    reports.extend(comm);

    let lin = linear_exactness()?;
    reports.push(residual_report("plane_wave_period", 16, lin.period_error, 1e-12));
    reports.push(residual_report("energy_drift", 48, lin.energy_drift, 1e-10));
    reports.push(residual_report("propagation_leakage", 96, lin.leakage, 1e-10));
    verdict.set("linear_exactness", lin.pass(), lin.period_error.max(lin.energy_drift).max(lin.leakage), 1e-10);

    let dec = operator_decomposition_reports(OPERATOR_GRID.0, OPERATOR_GRID.1, &DECOMPOSITION_TIMES)?;
    verdict.set("operator_decomposition", dec.iter().all(|r| r.pass), worst(&dec), 1e-6);
    reports.extend(dec);

    let refine = bochner_refinement(&id.resolutions, id.box_length, id.t)?;
    let finest = *id.resolutions.last().expect("non-empty");
    verdict.set("integrated_bochner", refine.pass(), refine.finest(), bochner_tolerance(finest));
    for (k, p) in refine.orders.iter().enumerate() {
        let mut r = residual_report("bochner_order", refine.reports[k + 1].resolution, *p, f64::INFINITY);
        r.pass = *p >= 4.0 || refine.reports[k + 1].relative() <= ROUNDOFF_FLOOR;
        r.tolerance_used = 4.0;
        reports.push(r);
    }
    reports.extend(refine.reports);
    reports.extend(first_order_reports(&id.resolutions, id.box_length, id.t)?);

    let ens = InequalityEnsembles::measure(id, cfg.seed)?;
    let measured = ens.constants();
    let mut worst_rel = 0.0f64;
    let mut ineq_pass = true;
    for (name, &value) in &measured {
        let c = stored.check(name, value)?;
        worst_rel = worst_rel.max(c.measured / c.stored);
        ineq_pass &= c.pass;
        constants.push(c);
    }
    verdict.set("calibrated_inequalities", ineq_pass, worst_rel, TOLERANCE);
    reports.extend(ens.reports(stored, ensemble_resolution)?);
    let probe = sobolev_sharpness_probe(id)?;
    let c_sob = stored.get("C_sob")?;
    let mut pr = probe.report("sobolev_sharpness", FREE_GRID.0, c_sob, TOLERANCE - 1.0);
    pr.pass = probe.ratio() >= c_sob / 10.0;
    reports.push(pr);

    Ok(SuiteOutput { reports, constants, verdict })
}
