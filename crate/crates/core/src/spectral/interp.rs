//! Off-lattice evaluation of the trigonometric interpolant and its first two derivatives.

use rustfft::num_complex::Complex64;

use super::field::{ScalarField, Spectrum};
use super::grid::Grid;
use super::ops::Jet;
use crate::par::*;

struct Column {
    ix: usize,
    iy: usize,
    modes: Vec<(usize, Complex64)>,
}

pub struct PointEvaluator {
    grid: Grid,
    x0: f64,
    columns: Vec<Column>,
    mode_count: usize,
}

impl PointEvaluator {
    /// Keeps coefficients with |c| > rel_tol · max|c|; 0 keeps every non-Nyquist mode.
    pub fn new(f: &ScalarField, rel_tol: f64) -> PointEvaluator {
        let grid = *f.grid();
        let n = grid.n();
        let nh = n / 2 + 1;
        let s = Spectrum::of(f);
        let norm = 1.0 / grid.len() as f64;
        let cmax = s.data().iter().fold(0.0f64, |m, c| m.max(c.norm()));
        let cut = rel_tol * cmax;
        let mut columns = Vec::new();
        let mut mode_count = 0;
        for ix in 0..n {
            for iy in 0..n {
                if ix == n / 2 || iy == n / 2 {
                    continue;
                }
                let mut modes = Vec::new();
                for iz in 0..n / 2 {
                    let c = s.data()[(ix * n + iy) * nh + iz];
                    if c.norm() > cut || (cut == 0.0 && c.norm() > 0.0) {
                        let w = if iz == 0 { 1.0 } else { 2.0 };
                        modes.push((iz, c * (w * norm)));
                    }
                }
                if !modes.is_empty() {
                    mode_count += modes.len();
                    columns.push(Column { ix, iy, modes });
                }
            }
        }
        PointEvaluator { grid, x0: grid.coord(0, 0), columns, mode_count }
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    fn phases(&self, x: f64) -> Vec<Complex64> {
        let n = self.grid.n();
        let dk = self.grid.dk();
        (0..n)
            .map(|i| {
                if i == n / 2 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::from_polar(1.0, self.grid.freq(i) as f64 * dk * (x - self.x0))
                }
            })
            .collect()
    }

    pub fn value(&self, x: [f64; 3]) -> f64 {
        let ex = self.phases(x[0]);
        let ey = self.phases(x[1]);
        let ez = self.phases(x[2]);
        let mut v = 0.0;
        for col in &self.columns {
            let exy = ex[col.ix] * ey[col.iy];
            for &(iz, c) in &col.modes {
                v += (c * exy * ez[iz]).re;
            }
        }
        v
    }

    pub fn jet(&self, x: [f64; 3]) -> Jet {
        let ex = self.phases(x[0]);
        let ey = self.phases(x[1]);
        let ez = self.phases(x[2]);
        let ka = self.grid.k_axis();
        let mut v = 0.0;
        let mut g = [0.0; 3];
        let mut h = [0.0; 6];
        for col in &self.columns {
            let exy = ex[col.ix] * ey[col.iy];
            let (kx, ky) = (ka[col.ix], ka[col.iy]);
            for &(iz, c) in &col.modes {
                let kz = ka[iz];
                let term = c * exy * ez[iz];
                let (re, im) = (term.re, term.im);
                v += re;
                g[0] -= kx * im;
                g[1] -= ky * im;
                g[2] -= kz * im;
                h[0] -= kx * kx * re;
                h[1] -= kx * ky * re;
                h[2] -= kx * kz * re;
                h[3] -= ky * ky * re;
                h[4] -= ky * kz * re;
                h[5] -= kz * kz * re;
            }
        }
        Jet { v, g, h: [[h[0], h[1], h[2]], [h[1], h[3], h[4]], [h[2], h[4], h[5]]] }
    }

    pub fn jets(&self, points: &[[f64; 3]]) -> Vec<Jet> {
        points.par_iter().map(|&p| self.jet(p)).collect()
    }
}
