//! Exactness checks of the free propagator: plane-wave periods, energy drift and
//! leakage outside the domain of influence.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::linear::{exact_linear_step, linear_energy, Propagator};
use super::speeds::SpeedTriple;
use crate::par::*;
use crate::spectral::{gradient, Grid, ScalarField, Spectrum};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearExactness {
    /// max |φ(T) − φ(0)| after one period, over the tested plane waves
    pub period_error: f64,
    /// max relative energy change over t ∈ [1, 10]
    pub energy_drift: f64,
    /// energy fraction outside the domain of influence at t = 10
    pub leakage: f64,
}

impl LinearExactness {
    pub fn pass(&self) -> bool {
        self.period_error <= 1e-12 && self.energy_drift <= 1e-10 && self.leakage <= 1e-10
    }
}

/// cos(ξ·x) waves along each axis for ε = (1, 4, 9), propagated one period 2π/ω.
pub fn plane_wave_period_error() -> Result<f64> {
    let g = Grid::new(16, 2.0 * PI)?;
    let s = SpeedTriple::new([1.0, 4.0, 9.0])?;
    let mut worst = 0.0f64;
    for axis in 0..3 {
        let om = s.eps[axis].sqrt();
        let phi = ScalarField::from_fn(g, 1.0, |x| x[axis].cos());
        let phi_t = ScalarField::from_fn(g, 1.0, |x| om * x[axis].sin());
        let (a, b) = exact_linear_step(&phi, &phi_t, 2.0 * PI / om, &s);
        worst = worst.max(a.axpy(-1.0, &phi).max_abs()).max(b.axpy(-1.0, &phi_t).max_abs());
    }
    Ok(worst)
}

/// Relative energy drift of a seeded anisotropic state stepped from t = 1 to 10 with dt = 0.1.
pub fn energy_drift() -> Result<f64> {
    let g = Grid::new(48, 16.0)?;
    let s = SpeedTriple::new([1.0, 4.0, 9.0])?;
    let phi = ScalarField::from_fn(g, 1.0, |x| (x[0] + x[1] * x[2]) * (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp());
    let phi_t = phi.map_with_x(|x, v| v * x[2]);
    let (mut a, mut b) = (Spectrum::of(&phi), Spectrum::of(&phi_t));
    let e0 = linear_energy(&a, &b, &s);
    let prop = Propagator::new(g, &s, 0.1);
    let mut worst = 0.0f64;
    for _ in 0..90 {
        prop.apply(&mut a, &mut b);
        worst = worst.max((linear_energy(&a, &b, &s) - e0).abs() / e0);
    }
    Ok(worst)
}

/// Energy density |∂_tφ|² + |∇φ|² of a free isotropic solution.
fn energy_density(phi: &ScalarField, phi_t: &ScalarField) -> Vec<f64> {
    let g = gradient(phi);
    (0..phi.data().len())
        .into_par_iter()
        .map(|i| phi_t.data()[i].powi(2) + g.iter().map(|c| c.data()[i].powi(2)).sum::<f64>())
        .collect()
}

/// A Gaussian of width 1.2 is below 1e−15 beyond r = 7.2; after t − t₀ = 9 at unit speed
/// the energy outside r = 7.2 + 9 must vanish.
pub fn propagation_leakage() -> Result<f64> {
    let g = Grid::new(96, 40.0)?;
    let s = SpeedTriple::isotropic();
    let sigma = 1.2;
    let r_data = 6.0 * sigma;
    let phi = ScalarField::from_fn(g, 1.0, |x| (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (sigma * sigma)).exp());
    let phi_t = phi.map_with_x(|x, v| 0.3 * x[0] * v);
    let (a, b) = exact_linear_step(&phi, &phi_t, 9.0, &s);
    let dens = energy_density(&a, &b);
    let radius = r_data + 9.0;
    let (mut outside, mut total) = (0.0, 0.0);
    for (i, d) in dens.iter().enumerate() {
        let x = g.point(i);
        total += d;
        if (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt() > radius {
            outside += d;
        }
    }
    Ok(if total == 0.0 { 0.0 } else { outside / total })
}

pub fn linear_exactness() -> Result<LinearExactness> {
    Ok(LinearExactness { period_error: plane_wave_period_error()?, energy_drift: energy_drift()?, leakage: propagation_leakage()? })
}
