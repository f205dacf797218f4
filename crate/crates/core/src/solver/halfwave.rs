//! Half-wave profiles U = (∂_t − iω(D))φ and V = e^{itω(D)}U.

use rustfft::num_complex::Complex64;

use super::speeds::SpeedTriple;
use crate::fft::plans;
use crate::par::*;
use crate::spectral::{ComplexField, Grid, ScalarField, Spectrum};

/// Full-grid coefficients e^{itω}(∂̂_tφ − iωφ̂), layout (ix·n + iy)·n + iz.
pub fn profile_spectrum(psi: &Spectrum, psi_t: &Spectrum, speeds: &SpeedTriple, t: f64, rotate: bool) -> Vec<Complex64> {
    let grid = *psi.grid();
    let n = grid.n();
    let nh = n / 2 + 1;
    let kx = grid.k_axis();
    let mut out = vec![Complex64::new(0.0, 0.0); n * n * n];
    out.par_chunks_mut(n).enumerate().for_each(|(col, row)| {
        let (ix, iy) = (col / n, col % n);
        for (iz, v) in row.iter_mut().enumerate() {
            // the half spectrum holds iz ≤ n/2; the rest by Hermitian symmetry
            let (a, b) = if iz < nh {
                let idx = (ix * n + iy) * nh + iz;
                (psi.data()[idx], psi_t.data()[idx])
            } else {
                let (jx, jy, jz) = ((n - ix) % n, (n - iy) % n, n - iz);
                let idx = (jx * n + jy) * nh + jz;
                (psi.data()[idx].conj(), psi_t.data()[idx].conj())
            };
            let om = speeds.omega([kx[ix], kx[iy], kx[iz]]);
            let u = b - Complex64::new(0.0, om) * a;
            *v = if rotate { u * Complex64::from_polar(1.0, t * om) } else { u };
        }
    });
    out
}

fn to_physical(grid: Grid, mut spec: Vec<Complex64>, t: f64) -> ComplexField {
    plans(grid.n()).inverse_full(&mut spec);
    ComplexField::new(grid, spec, t).expect("shape")
}

/// U(t) in physical space.
pub fn u_profile(phi: &ScalarField, phi_t: &ScalarField, speeds: &SpeedTriple) -> ComplexField {
    let s = profile_spectrum(&Spectrum::of(phi), &Spectrum::of(phi_t), speeds, phi.time(), false);
    to_physical(*phi.grid(), s, phi.time())
}

/// V(t) = e^{itω(D)}U(t) in physical space.
pub fn half_wave_profile(phi: &ScalarField, phi_t: &ScalarField, speeds: &SpeedTriple) -> ComplexField {
    let s = profile_spectrum(&Spectrum::of(phi), &Spectrum::of(phi_t), speeds, phi.time(), true);
    to_physical(*phi.grid(), s, phi.time())
}

/// ‖a − b‖_{L²} for two full-grid coefficient arrays (Parseval).
pub fn profile_distance(grid: &Grid, a: &[Complex64], b: &[Complex64]) -> f64 {
    let s: f64 = a.par_iter().zip(b.par_iter()).map(|(x, y)| (x - y).norm_sqr()).sum();
    (s * grid.cell_volume() / grid.len() as f64).sqrt()
}
