//! Per-output-time diagnostics of a system state.

use serde::{Deserialize, Serialize};

use crate::par::*;
use crate::solver::{nonlinearity_gradient_norms, SpeedTriple, SystemState, Trilinear};
use crate::spectral::ops::{derivative_of_spectrum, UNIT};
use crate::spectral::{ScalarField, Spectrum};
use crate::vectorfield::{gamma_density, gamma_energy_of_spectra, monomials};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsSettings {
    pub k_max: usize,
    /// order of K
    pub k_mid: usize,
    /// order of N_low
    pub k_low: usize,
    pub delta: f64,
    pub cone_bins: usize,
}

impl DiagnosticsSettings {
    pub fn new(k_max: usize, delta: f64, cone_bins: usize) -> DiagnosticsSettings {
        DiagnosticsSettings {
            k_max,
            k_mid: k_max.saturating_sub(2),
            k_low: k_max.saturating_sub(1),
            delta,
            cone_bins,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentDiagnostics {
    /// ‖∂Γ^{≤k_max}φ‖_{L²}
    pub e: f64,
    /// ‖∂Γ^{≤k_mid}φ‖_{L∞}
    pub k: f64,
    /// ‖ℱ(∂Γ^{≤k_max}φ)‖_{L∞_ξ}
    pub w: f64,
    pub n_high: f64,
    pub n_low: f64,
    /// sup |∂φ| over shells of t − r
    pub cone: Vec<f64>,
    /// sup_x |∂φ|
    pub sup_grad: f64,
    /// sup |∂φ| over |x| ≤ t/2
    pub sup_inner: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub comps: Vec<ComponentDiagnostics>,
}

/// |∂φ| = √(∂_tφ² + |∇φ|²) from spectra.
pub fn gradient_magnitude(psi: &Spectrum, psi_t: &Spectrum, t: f64) -> ScalarField {
    let ft = psi_t.to_field(t);
    let g: Vec<ScalarField> = UNIT.par_iter().map(|a| derivative_of_spectrum(psi, *a, t)).collect();
    let data = (0..ft.data().len())
        .into_par_iter()
        .map(|i| {
            let v = [ft.data()[i], g[0].data()[i], g[1].data()[i], g[2].data()[i]];
            (v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]).sqrt()
        })
        .collect();
    ScalarField::new(*psi.grid(), data, t).expect("shape")
}

/// Bin edges q_b = t·b/B partitioning [0, t].
pub fn cone_bin_edges(t: f64, bins: usize) -> Vec<f64> {
    (0..=bins).map(|b| t * b as f64 / bins as f64).collect()
}

/// sup of `mag` over each shell {q_lo ≤ t − r_i < q_hi}; empty shells report 0.
pub fn cone_binned_sup(mag: &ScalarField, speeds: &SpeedTriple, t: f64, edges: &[f64]) -> Result<Vec<f64>> {
    if edges.len() < 2 || edges.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Precondition("cone bins must be increasing".into()));
    }
    let grid = *mag.grid();
    let nb = edges.len() - 1;
    let partial: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .par_fold_reduce(
            || vec![0.0; nb],
            |mut acc, i| {
                let q = t - speeds.cone_radius(grid.point(i));
                if q >= edges[0] && q < edges[nb] {
                    let b = edges.partition_point(|e| *e <= q) - 1;
                    acc[b] = f64::max(acc[b], mag.data()[i].abs());
                }
                acc
            },
            |a, b| a.iter().zip(&b).map(|(x, y)| x.max(*y)).collect(),
        );
    Ok(partial)
}

/// h³·max_ξ √(Σ_{J,μ} |DFT(∂_μΓ^Jφ)|²) over the monomials of order ≤ k.
pub fn linf_xi_norm(levels: &[(Spectrum, Spectrum)], k: usize) -> Result<f64> {
    if levels.len() < k + 1 {
        return Err(Error::Order { have: levels.len().saturating_sub(1), need: k });
    }
    let dens = gamma_density(levels, [1.0; 3], k);
    let m = dens.par_iter().cloned().par_reduce(|| 0.0, f64::max);
    Ok(levels[0].0.grid().cell_volume() * m.sqrt())
}

/// h³·max|DFT f|, the box surrogate of sup_ξ|ℱf|.
pub fn fourier_sup(f: &ScalarField) -> f64 {
    let s = Spectrum::of(f);
    f.grid().cell_volume() * s.data().par_iter().map(|c| c.norm()).par_reduce(|| 0.0, f64::max)
}

/// sup_x √(Σ_{|α|+j ≤ k} Σ_μ |∂_μ∂^αS^jφ|²)
pub fn linf_gamma_norm(levels: &[(Spectrum, Spectrum)], k: usize, t: f64) -> Result<f64> {
    if levels.len() < k + 1 {
        return Err(Error::Order { have: levels.len().saturating_sub(1), need: k });
    }
    let grid = *levels[0].0.grid();
    let mut acc = vec![0.0; grid.len()];
    for m in monomials(k as u32) {
        let (s, st) = &levels[m.j as usize];
        let mut fields = vec![derivative_of_spectrum(st, m.alpha, t)];
        for u in UNIT {
            let a = [m.alpha[0] + u[0], m.alpha[1] + u[1], m.alpha[2] + u[2]];
            fields.push(derivative_of_spectrum(s, a, t));
        }
        for f in &fields {
            acc.par_iter_mut().zip(f.data().par_iter()).for_each(|(a, v)| *a += v * v);
        }
    }
    Ok(acc.par_iter().cloned().par_reduce(|| 0.0, f64::max).sqrt())
}

pub fn diagnostics_row(
    state: &SystemState,
    speeds: &[SpeedTriple],
    nl: &Trilinear,
    cfg: &DiagnosticsSettings,
) -> Result<DiagnosticsRow> {
    let t = state.time();
    if state.order() < cfg.k_max {
        return Err(Error::Order { have: state.order(), need: cfg.k_max });
    }
    let nn = nonlinearity_gradient_norms(state, speeds, nl, &[cfg.k_max, cfg.k_low])?;
    let edges = cone_bin_edges(t, cfg.cone_bins.max(1));
    let grid = *state.grid();
    let comps = state
        .comps
        .iter()
        .zip(speeds)
        .enumerate()
        .map(|(c, (levels, sp))| {
            let mag = gradient_magnitude(&levels[0].0, &levels[0].1, t);
            let sup_grad = mag.max_abs();
            let sup_inner = (0..grid.len())
                .into_par_iter()
                .map(|i| {
                    let x = grid.point(i);
                    if (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt() <= t / 2.0 {
                        mag.data()[i]
                    } else {
                        0.0
                    }
                })
                .par_reduce(|| 0.0, f64::max);
            Ok(ComponentDiagnostics {
                e: gamma_energy_of_spectra(levels, sp.eps, cfg.k_max)?,
                k: linf_gamma_norm(levels, cfg.k_mid, t)?,
                w: linf_xi_norm(levels, cfg.k_max)?,
                n_high: nn[c][0],
                n_low: nn[c][1],
                cone: cone_binned_sup(&mag, sp, t, &edges)?,
                sup_grad,
                sup_inner,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DiagnosticsRow { t, comps })
}
