//! Config → simulated trajectory → verdict.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::bootstrap::{bootstrap_monitor, japanese, BootstrapMode, BootstrapReport, DriftPair};
use super::config::{Config, Normalize};
use super::constants::CalibratedConstants;
use super::diagnostics::{diagnostics_row, gradient_magnitude, DiagnosticsSettings};
use super::fit::{decay_fit, last_octave, FitResult};
use super::verdict::Verdict;
use crate::solver::{
    integrate, scattering_drift, seeded_packet, Flags, PacketSpec, ProfileSnapshot, SpeedTriple, Stepper, SystemSpec,
    SystemState, Trajectory, Trilinear, Validation,
};
use crate::spectral::{Grid, ScalarField, Spectrum};
use crate::vectorfield::{gamma_energy, populate_lattice, populate_system};
use crate::{Error, Result};

pub struct Prepared {
    pub grid: Grid,
    pub spec: SystemSpec,
    pub validation: Validation,
    pub state: SystemState,
    pub settings: DiagnosticsSettings,
    /// factor applied to the generated packets
    pub scale: f64,
}

pub fn settings_of(cfg: &Config) -> DiagnosticsSettings {
    let d = &cfg.diagnostics;
    let mut s = DiagnosticsSettings::new(d.k_max, d.delta, d.cone_bins);
    if let Some(k) = d.k_mid {
        s.k_mid = k.min(d.k_max);
    }
    if let Some(k) = d.k_low {
        s.k_low = k.min(d.k_max);
    }
    s
}

pub fn system_of(cfg: &Config) -> Result<SystemSpec> {
    let s = &cfg.system;
    let speeds = s
        .eps
        .iter()
        .map(|e| SpeedTriple::new(*e).map(|v| v.with_cone_exponent(s.cone_exponent)))
        .collect::<Result<Vec<_>>>()?;
    let nl = Trilinear::new(s.m, s.nonlinearity.clone())?;
    let flags = Flags { separation_required: s.separation_required, no_self_interaction: s.no_self_interaction };
    let mut spec = SystemSpec::new(speeds, nl, flags)?;
    spec.separation_margin = s.separation_margin;
    Ok(spec)
}

fn l1_of_gradient(phi: &ScalarField, phi_t: &ScalarField) -> f64 {
    let mag = gradient_magnitude(&Spectrum::of(phi), &Spectrum::of(phi_t), phi.time());
    mag.data().iter().sum::<f64>() * phi.grid().cell_volume()
}

pub fn prepare(cfg: &Config) -> Result<Prepared> {
    let grid = Grid::new(cfg.grid.n, cfg.grid.l)?;
    let spec = system_of(cfg)?;
    let validation = spec.validate(&grid)?;
    let settings = settings_of(cfg);
    let t0 = cfg.run.t0;
    let k = settings.k_max;
    let raw: Vec<(ScalarField, ScalarField)> = (0..spec.m())
        .map(|c| {
            let p = PacketSpec {
                sigma: cfg.data.sigma,
                center: cfg.data.centers.get(c).copied().unwrap_or([0.0; 3]),
                degree: cfg.data.degree,
                velocity: cfg.data.velocity,
            };
            seeded_packet(grid, t0, &p, cfg.seed, c as u64)
        })
        .collect();
    // normalise on the free lattice, which is linear in the data
    let mut size = 0.0;
    if cfg.data.normalize != Normalize::None {
        for ((a, b), s) in raw.iter().zip(&spec.speeds) {
            size += gamma_energy(&populate_lattice(a, b, s.eps, k)?, k)?;
            if cfg.data.normalize == Normalize::L1 {
                size += l1_of_gradient(a, b);
            }
        }
    }
    let scale = match cfg.data.normalize {
        Normalize::None => cfg.system.epsilon0,
        _ if size > 0.0 => cfg.system.epsilon0 / size,
        _ => 0.0,
    };
    let data: Vec<(ScalarField, ScalarField)> = raw.iter().map(|(a, b)| (a.scale(scale), b.scale(scale))).collect();
    let eps: Vec<[f64; 3]> = spec.speeds.iter().map(|s| s.eps).collect();
    let lattices = populate_system(&data, &eps, spec.source(), k)?;
    let state = SystemState::from_lattices(&lattices)?;
    Ok(Prepared { grid, spec, validation, state, settings, scale })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub config_hash: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub constants: CalibratedConstants,
    pub conventions: BTreeMap<String, String>,
    pub validation: Validation,
    pub data_scale: f64,
    pub warning: bool,
    pub max_gradient: f64,
}

pub fn conventions(settings: &DiagnosticsSettings, cone_exponent: f64) -> BTreeMap<String, String> {
    let mut c = BTreeMap::new();
    c.insert(
        "W".into(),
        "W = h^3 * max over DFT bins of sqrt(sum_{J,mu} |DFT(d_mu Gamma^J phi)|^2); equals sup|F f| for resolved f with F f(xi) = int f e^{-i x.xi} dx".into(),
    );
    c.insert("E".into(), "speed-weighted energy sqrt(sum_J |d_t Gamma^J phi|^2 + sum_j eps_j |d_j Gamma^J phi|^2)".into());
    c.insert("Gamma family".into(), "monomials d^alpha S^j with |alpha| + j <= k".into());
    c.insert("orders".into(), format!("k_max = {}, K order = {}, N_low order = {}", settings.k_max, settings.k_mid, settings.k_low));
    c.insert("cone radius".into(), format!("r_i = sqrt(sum_j eps_j^({cone_exponent}) x_j^2)"));
    c
}

pub struct RunOutput {
    pub trajectory: Trajectory,
    pub verdict: Verdict,
    pub manifest: Manifest,
    pub bootstrap: Option<BootstrapReport>,
    pub fits: BTreeMap<String, FitResult>,
}

pub fn simulate(cfg: &Config, prep: Prepared) -> Result<(Trajectory, Prepared)> {
    let mut prep = prep;
    let speeds = prep.spec.speeds.clone();
    let nl = prep.spec.nonlinearity.clone();
    let settings = prep.settings;
    let dt = cfg.run.dt;
    let mut traj = Trajectory::new(prep.grid);
    let mut pending: Vec<f64> = cfg.run.profile_times.clone();
    for pair in &cfg.checks.drift_pairs {
        pending.extend_from_slice(pair);
    }
    pending.sort_by(f64::total_cmp);
    pending.dedup();
    let source = if nl.is_zero() { None } else { Some(&nl as &dyn crate::vectorfield::Source) };
    let mut stepper = Stepper::new(prep.grid, &speeds, source, dt)?;
    let mut free: Vec<(Spectrum, Spectrum)> = prep.state.comps.iter().map(|l| l[0].clone()).collect();
    let mut started = false;
    integrate(&mut stepper, &mut prep.state, cfg.run.t_end, cfg.run.output_every, |st, stp, output| {
        if started {
            stp.free_step(&mut free);
        }
        started = true;
        let t = st.time();
        while let Some(&pt) = pending.first() {
            if pt < t - dt / 2.0 {
                pending.remove(0);
            } else if (pt - t).abs() <= dt / 2.0 {
                let mut snap = ProfileSnapshot::against_free(st, &free, &speeds);
                snap.t = pt;
                traj.profiles.push(snap);
                pending.remove(0);
            } else {
                break;
            }
        }
        if output {
            traj.push(diagnostics_row(st, &speeds, &nl, &settings)?)?;
        }
        Ok(())
    })?;
    traj.warning = stepper.warning;
    traj.max_gradient = stepper.max_gradient;
    Ok((traj, prep))
}

fn series(traj: &Trajectory, f: impl Fn(&super::diagnostics::DiagnosticsRow) -> f64) -> Vec<(f64, f64)> {
    traj.rows.iter().map(|r| (r.t, f(r))).collect()
}

fn fit_window(cfg: &Config, s: &[(f64, f64)]) -> (f64, f64) {
    cfg.checks.fit_window.unwrap_or_else(|| if cfg.run.t_end >= 32.0 && cfg.run.t0 <= 8.0 { (8.0, 32.0) } else { last_octave(s) })
}

/// Fill the verdict entries a run can decide.
pub fn evaluate(cfg: &Config, prep: &Prepared, traj: &Trajectory) -> Result<(Verdict, Option<BootstrapReport>, BTreeMap<String, FitResult>)> {
    let mut v = Verdict::default();
    let mut fits = BTreeMap::new();
    let linear = prep.spec.nonlinearity.is_zero();
    let first = traj.rows.first().ok_or_else(|| Error::Precondition("empty trajectory".into()))?;
    if linear {
        let mut drift: f64 = 0.0;
        for (c, d0) in first.comps.iter().enumerate() {
            for r in &traj.rows {
                if d0.e > 0.0 {
                    drift = drift.max((r.comps[c].e - d0.e).abs() / d0.e);
                }
            }
        }
        v.set("linear_exactness", drift <= 1e-10, drift, 1e-10);
        let s = series(traj, |r| r.comps[0].sup_grad);
        let w = fit_window(cfg, &s);
        if let Ok(f) = decay_fit(&s, w) {
            v.set("uniform_decay", (-1.1..=-0.9).contains(&f.exponent), f.exponent, -0.9);
            fits.insert("sup_grad_1".into(), f);
        }
        let s = series(traj, |r| r.comps[0].sup_inner);
        match decay_fit(&s, w) {
            Ok(f) => {
                v.set("interior_cone_rate", (-1.1..=-0.85).contains(&f.exponent), f.exponent, -0.85);
                fits.insert("sup_inner_1".into(), f);
            }
            Err(Error::NonPositive { .. }) => v.set("interior_cone_rate", false, f64::NAN, -0.85),
            Err(_) => {}
        }
    }
    let mut report = None;
    if let Some(mode) = cfg.checks.bootstrap {
        let mut r = bootstrap_monitor(traj, cfg.system.epsilon0, cfg.diagnostics.delta, mode, prep.spec.flags)?;
        match mode {
            BootstrapMode::Thm3 => {
                for c in 0..prep.spec.m() {
                    for pair in cfg.checks.drift_pairs.chunks(2) {
                        if let [early, late] = pair {
                            r.drifts.push(DriftPair {
                                component: c,
                                early: (early[0], early[1]),
                                late: (late[0], late[1]),
                                early_drift: scattering_drift(traj, c, early[0], early[1])?,
                                late_drift: scattering_drift(traj, c, late[0], late[1])?,
                            });
                        }
                    }
                }
                let ok = r.holds() && !traj.warning && r.drifts.iter().all(DriftPair::decreases);
                v.set("bootstrap_stability", ok, r.sup, r.bound);
            }
            BootstrapMode::Thm4 => {
                let (ok, worst) = l1_checks(traj, cfg.checks.bounded_factor, cfg.diagnostics.delta);
                v.set("l1_bootstrap", ok && !traj.warning, worst, 2.0);
            }
        }
        report = Some(r);
    }
    Ok((v, report, fits))
}

/// E_i ≤ B·E_i(t₀), W_i(t) ≤ 2⟨t⟩^δ W_i(t₀), K_i⟨t⟩^{1−δ} ≤ B·K_i(t₀)⟨t₀⟩^{1−δ}, and no growth
/// of E_i or K_i⟨t⟩^{1−δ} over the last octave beyond ⟨t⟩^δ. Returns (pass, max W ratio).
pub fn l1_checks(traj: &Trajectory, bounded: f64, delta: f64) -> (bool, f64) {
    let first = &traj.rows[0];
    let t0 = first.t;
    let mut ok = true;
    let mut worst_w: f64 = 0.0;
    for (c, d0) in first.comps.iter().enumerate() {
        let k0 = d0.k * japanese(t0).powf(1.0 - delta);
        for r in &traj.rows {
            let d = &r.comps[c];
            let jt = japanese(r.t);
            ok &= d.e <= bounded * d0.e;
            ok &= d.k * jt.powf(1.0 - delta) <= bounded * k0;
            if d0.w > 0.0 {
                let ratio = d.w / (jt.powf(delta) * d0.w);
                worst_w = worst_w.max(ratio);
            }
        }
        for f in [
            series(traj, |r| r.comps[c].e),
            series(traj, |r| r.comps[c].k * japanese(r.t).powf(1.0 - delta)),
        ] {
            if let Ok(fit) = decay_fit(&f, last_octave(&f)) {
                ok &= fit.exponent <= delta;
            }
        }
    }
    (ok && worst_w <= 2.0, worst_w)
}

pub fn execute_run(cfg: &Config) -> Result<RunOutput> {
    let prep = prepare(cfg)?;
    let (traj, prep) = simulate(cfg, prep)?;
    let (verdict, bootstrap, fits) = evaluate(cfg, &prep, &traj)?;
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").into(),
        config_hash: cfg.hash(),
        seed: cfg.seed,
        config: serde_json::to_value(cfg)?,
        constants: CalibratedConstants::bundled(),
        conventions: conventions(&prep.settings, cfg.system.cone_exponent),
        validation: prep.validation,
        data_scale: prep.scale,
        warning: traj.warning,
        max_gradient: traj.max_gradient,
    };
    Ok(RunOutput { trajectory: traj, verdict, manifest, bootstrap, fits })
}
