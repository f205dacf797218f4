//! Exact spectral propagator of the free anisotropic wave equation.

use rustfft::num_complex::Complex64;

use super::speeds::SpeedTriple;
use crate::par::*;
use crate::spectral::{Grid, ScalarField, Spectrum};

/// Per-mode multipliers of the flow map over one fixed step.
#[derive(Debug, Clone)]
pub struct Propagator {
    grid: Grid,
    dt: f64,
    cos: Vec<f64>,
    /// sin(ω dt)/ω, equal to dt at ω = 0
    sinc: Vec<f64>,
    /// ω sin(ω dt)
    wsin: Vec<f64>,
}

impl Propagator {
    pub fn new(grid: Grid, speeds: &SpeedTriple, dt: f64) -> Propagator {
        let n = grid.n();
        let nh = n / 2 + 1;
        let kx = grid.k_axis();
        let kz = grid.k_half();
        let len = n * n * nh;
        let mut cos = vec![0.0; len];
        let mut sinc = vec![0.0; len];
        let mut wsin = vec![0.0; len];
        cos.par_chunks_mut(nh)
            .zip(sinc.par_chunks_mut(nh))
            .zip(wsin.par_chunks_mut(nh))
            .enumerate()
            .for_each(|(col, ((c, s), w))| {
                let (ix, iy) = (col / n, col % n);
                for iz in 0..nh {
                    let om = speeds.omega([kx[ix], kx[iy], kz[iz]]);
                    let (sn, cs) = (om * dt).sin_cos();
                    c[iz] = cs;
                    s[iz] = if om == 0.0 { dt } else { sn / om };
                    w[iz] = om * sn;
                }
            });
        Propagator { grid, dt, cos, sinc, wsin }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn apply(&self, psi: &mut Spectrum, psi_t: &mut Spectrum) {
        psi.data_mut()
            .par_iter_mut()
            .zip(psi_t.data_mut().par_iter_mut())
            .enumerate()
            .for_each(|(i, (p, q))| {
                let (a, b): (Complex64, Complex64) = (*p, *q);
                *p = a * self.cos[i] + b * self.sinc[i];
                *q = b * self.cos[i] - a * self.wsin[i];
            });
    }
}

/// (φ, ∂_tφ)(t) ↦ (φ, ∂_tφ)(t + dt) for □φ = 0.
pub fn exact_linear_step(phi: &ScalarField, phi_t: &ScalarField, dt: f64, speeds: &SpeedTriple) -> (ScalarField, ScalarField) {
    let prop = Propagator::new(*phi.grid(), speeds, dt);
    let mut a = Spectrum::of(phi);
    let mut b = Spectrum::of(phi_t);
    prop.apply(&mut a, &mut b);
    let t = phi.time() + dt;
    (a.into_field(t), b.into_field(t))
}

/// ‖∂_tφ‖² + Σ_j ε_j‖∂_jφ‖², the conserved energy of □φ = 0.
pub fn linear_energy(psi: &Spectrum, psi_t: &Spectrum, speeds: &SpeedTriple) -> f64 {
    let g = psi.grid();
    let n3 = (g.n() as f64).powi(3);
    let e = psi_t.weighted_sum_sq(|_| 1.0) + psi.weighted_sum_sq(|k| speeds.omega(k).powi(2));
    e * g.cell_volume() / n3
}
