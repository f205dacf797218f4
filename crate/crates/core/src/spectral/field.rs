use rustfft::num_complex::Complex64;

use super::grid::Grid;
use crate::error::{Error, Result};
use crate::fft::plans;
use crate::par::*;

/// Real samples on a grid, tagged with a time.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    data: Vec<f64>,
    time: f64,
}

impl ScalarField {
    pub fn new(grid: Grid, data: Vec<f64>, time: f64) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::Shape { expected: grid.len(), got: data.len() });
        }
        Ok(ScalarField { grid, data, time })
    }

    pub fn zeros(grid: Grid, time: f64) -> Self {
        ScalarField { grid, data: vec![0.0; grid.len()], time }
    }

    pub fn from_fn<F>(grid: Grid, time: f64, f: F) -> Self
    where
        F: Fn([f64; 3]) -> f64 + Sync,
    {
        let data = (0..grid.len()).into_par_iter().map(|i| f(grid.point(i))).collect();
        ScalarField { grid, data, time }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.time = t;
        self
    }

    pub fn check_same_grid(&self, other: &ScalarField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Shape { expected: self.grid.len(), got: other.grid.len() });
        }
        Ok(())
    }

    /// Pointwise map with the sample position.
    pub fn map_with_x<F>(&self, f: F) -> ScalarField
    where
        F: Fn([f64; 3], f64) -> f64 + Sync,
    {
        let g = self.grid;
        let data = self.data.par_iter().enumerate().map(|(i, &v)| f(g.point(i), v)).collect();
        ScalarField { grid: g, data, time: self.time }
    }

    pub fn map<F>(&self, f: F) -> ScalarField
    where
        F: Fn(f64) -> f64 + Sync,
    {
        let data = self.data.par_iter().map(|&v| f(v)).collect();
        ScalarField { grid: self.grid, data, time: self.time }
    }

    pub fn zip_map<F>(&self, other: &ScalarField, f: F) -> ScalarField
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        let data = self.data.par_iter().zip(other.data.par_iter()).map(|(&a, &b)| f(a, b)).collect();
        ScalarField { grid: self.grid, data, time: self.time }
    }

    pub fn scale(&self, a: f64) -> ScalarField {
        self.map(|v| a * v)
    }

    /// self + a * other
    pub fn axpy(&self, a: f64, other: &ScalarField) -> ScalarField {
        self.zip_map(other, |x, y| x + a * y)
    }

    pub fn add_assign_scaled(&mut self, a: f64, other: &ScalarField) {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        self.data.par_iter_mut().zip(other.data.par_iter()).for_each(|(x, &y)| *x += a * y);
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Zero the Nyquist planes so the field is band-limited.
    pub fn project(&self) -> ScalarField {
        Spectrum::of(self).project().to_field(self.time)
    }
}

/// Complex samples on a grid, tagged with a time.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Grid,
    data: Vec<Complex64>,
    time: f64,
}

impl ComplexField {
    pub fn new(grid: Grid, data: Vec<Complex64>, time: f64) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::Shape { expected: grid.len(), got: data.len() });
        }
        Ok(ComplexField { grid, data, time })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn re(&self) -> ScalarField {
        ScalarField { grid: self.grid, data: self.data.iter().map(|c| c.re).collect(), time: self.time }
    }

    pub fn im(&self) -> ScalarField {
        ScalarField { grid: self.grid, data: self.data.iter().map(|c| c.im).collect(), time: self.time }
    }

    /// (U + conj U) / 2 sample by sample.
    pub fn real_part_field(&self) -> ScalarField {
        self.re()
    }
}

/// Half spectrum of a real field (transient, never stored in fields).
#[derive(Debug, Clone)]
pub struct Spectrum {
    grid: Grid,
    data: Vec<Complex64>,
}

impl Spectrum {
    pub fn of(f: &ScalarField) -> Spectrum {
        let p = plans(f.grid.n());
        Spectrum { grid: f.grid, data: p.forward_real(&f.data) }
    }

    pub fn from_raw(grid: Grid, data: Vec<Complex64>) -> Spectrum {
        assert_eq!(data.len(), grid.n() * grid.n() * (grid.n() / 2 + 1));
        Spectrum { grid, data }
    }

    pub fn zeros(grid: Grid) -> Spectrum {
        Spectrum { grid, data: vec![Complex64::new(0.0, 0.0); grid.n() * grid.n() * (grid.n() / 2 + 1)] }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn to_field(&self, time: f64) -> ScalarField {
        let p = plans(self.grid.n());
        ScalarField { grid: self.grid, data: p.inverse_real(self.data.clone()), time }
    }

    pub fn into_field(self, time: f64) -> ScalarField {
        let p = plans(self.grid.n());
        ScalarField { grid: self.grid, data: p.inverse_real(self.data), time }
    }

    /// Multiply every coefficient by `sym(k)` where k is the derivative wavenumber.
    pub fn apply<F>(&self, sym: F) -> Spectrum
    where
        F: Fn([f64; 3]) -> Complex64 + Sync,
    {
        let mut out = self.clone();
        out.apply_in_place(sym);
        out
    }

    pub fn apply_in_place<F>(&mut self, sym: F)
    where
        F: Fn([f64; 3]) -> Complex64 + Sync,
    {
        let n = self.grid.n();
        let nh = n / 2 + 1;
        let kx = self.grid.k_axis();
        let kz = self.grid.k_half();
        self.data.par_chunks_mut(n * nh).enumerate().for_each(|(ix, slab)| {
            for iy in 0..n {
                for iz in 0..nh {
                    slab[iy * nh + iz] *= sym([kx[ix], kx[iy], kz[iz]]);
                }
            }
        });
    }

    /// Same as `apply` but the symbol also sees the raw bin indices.
    pub fn apply_indexed<F>(&mut self, sym: F)
    where
        F: Fn([usize; 3], [f64; 3]) -> Complex64 + Sync,
    {
        let n = self.grid.n();
        let nh = n / 2 + 1;
        let kx = self.grid.k_axis();
        let kz = self.grid.k_half();
        self.data.par_chunks_mut(n * nh).enumerate().for_each(|(ix, slab)| {
            for iy in 0..n {
                for iz in 0..nh {
                    slab[iy * nh + iz] *= sym([ix, iy, iz], [kx[ix], kx[iy], kz[iz]]);
                }
            }
        });
    }

    pub fn project(mut self) -> Spectrum {
        let half = self.grid.n() / 2;
        self.apply_indexed(|i, _| {
            if i[0] == half || i[1] == half || i[2] == half {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(1.0, 0.0)
            }
        });
        self
    }

    /// Σ over the full spectrum of w(k)|c_k|², using Hermitian symmetry of the half spectrum.
    /// Divided by n³ this is Σ_x |f|² (Parseval).
    pub fn weighted_sum_sq<F>(&self, w: F) -> f64
    where
        F: Fn([f64; 3]) -> f64 + Sync,
    {
        let n = self.grid.n();
        let nh = n / 2 + 1;
        let kx = self.grid.k_axis();
        let kz = self.grid.k_half();
        let partial: Vec<f64> = self
            .data
            .par_chunks(n * nh)
            .enumerate()
            .map(|(ix, slab)| {
                let mut acc = 0.0;
                for iy in 0..n {
                    for iz in 0..nh {
                        let mult = if iz == 0 || iz == n / 2 { 1.0 } else { 2.0 };
                        acc += mult * slab[iy * nh + iz].norm_sqr() * w([kx[ix], kx[iy], kz[iz]]);
                    }
                }
                acc
            })
            .collect();
        partial.iter().sum()
    }
}
