//! Norms of the commuted nonlinearity Γ^{≤k}N.

use rustfft::num_complex::Complex64;

use super::speeds::SpeedTriple;
use super::stepper::SystemState;
use super::system::Trilinear;
use crate::par::*;
use crate::spectral::ops::{derivative_of_spectrum, UNIT};
use crate::spectral::{ScalarField, Spectrum};
use crate::vectorfield::word::binomial;
use crate::vectorfield::{combine_spectra, gamma_energy_of_spectra, monomials, shifted_power_coeffs, Derivation, Source};
use crate::Result;

/// Spectra of (S^pN_c, ∂_tS^pN_c), p ≤ k, for every component.
///
/// ∂_t goes through the product rule; the only second time derivative that appears,
/// ∂_t²(S − 1)^qφ, is replaced by Δ_ε(S − 1)^qφ − (S + 1)^q N.
pub fn commuted_nonlinearity(
    state: &SystemState,
    speeds: &[SpeedTriple],
    nl: &Trilinear,
    k: usize,
) -> Result<Vec<Vec<(Spectrum, Spectrum)>>> {
    let t = state.time();
    let table = state.scaling_table(k);
    let powers = nl.powers(Derivation::Scaling, t, &table, k)?;
    let dtable: Vec<Vec<[ScalarField; 4]>> = state
        .comps
        .iter()
        .enumerate()
        .map(|(c, levels)| {
            (0..=k)
                .into_par_iter()
                .map(|q| {
                    let co = shifted_power_coeffs(q, -1.0);
                    let psi = combine_spectra(&levels[..=q].iter().map(|l| &l.0).collect::<Vec<_>>(), &co);
                    let psi_t = combine_spectra(&levels[..=q].iter().map(|l| &l.1).collect::<Vec<_>>(), &co);
                    let e = speeds[c];
                    let mut tt = psi.apply(|kv| Complex64::new(-e.omega(kv).powi(2), 0.0)).into_field(t);
                    for r in 0..=q {
                        tt.add_assign_scaled(-binomial(q as u32, r as u32), &powers[c][r]);
                    }
                    [
                        tt,
                        derivative_of_spectrum(&psi_t, UNIT[0], t),
                        derivative_of_spectrum(&psi_t, UNIT[1], t),
                        derivative_of_spectrum(&psi_t, UNIT[2], t),
                    ]
                })
                .collect()
        })
        .collect();
    let dpowers = nl.powers_dt(t, &table, &dtable, k)?;
    Ok(powers
        .iter()
        .zip(&dpowers)
        .map(|(p, d)| p.par_iter().zip(d.par_iter()).map(|(a, b)| (Spectrum::of(a), Spectrum::of(b))).collect())
        .collect())
}

/// (‖Γ^{≤k}N_c‖_{L¹}, ‖∂Γ^{≤k}N_c‖_{L²}) per component, over the monomials ∂^αS^j with
/// |α| + j ≤ k; the L¹ family is combined in ℓ².
pub fn nonlinearity_l1_l2_norms(
    state: &SystemState,
    speeds: &[SpeedTriple],
    nl: &Trilinear,
    k: usize,
) -> Result<Vec<(f64, f64)>> {
    let t = state.time();
    let g = commuted_nonlinearity(state, speeds, nl, k)?;
    let dv = state.grid().cell_volume();
    g.iter()
        .map(|levels| {
            let l2 = gamma_energy_of_spectra(levels, [1.0; 3], k)?;
            let l1sq: f64 = monomials(k as u32)
                .par_iter()
                .map(|m| {
                    let f = derivative_of_spectrum(&levels[m.j as usize].0, m.alpha, t);
                    let l1: f64 = f.data().iter().map(|v| v.abs()).sum::<f64>() * dv;
                    l1 * l1
                })
                .sum();
            Ok((l1sq.sqrt(), l2))
        })
        .collect()
}

/// ‖∂Γ^{≤k}N_c‖_{L²} for each order in `orders` (each ≤ the state order).
pub fn nonlinearity_gradient_norms(
    state: &SystemState,
    speeds: &[SpeedTriple],
    nl: &Trilinear,
    orders: &[usize],
) -> Result<Vec<Vec<f64>>> {
    let k = orders.iter().cloned().max().unwrap_or(0);
    if nl.is_zero() {
        return Ok(vec![vec![0.0; orders.len()]; state.m()]);
    }
    let g = commuted_nonlinearity(state, speeds, nl, k)?;
    g.iter().map(|levels| orders.iter().map(|&o| gamma_energy_of_spectra(levels, [1.0; 3], o)).collect()).collect()
}
