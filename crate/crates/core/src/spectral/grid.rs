use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodic cube `[-L/2, L/2)^3` sampled at cell centers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n: usize,
    box_length: f64,
    origin_offset: [f64; 3],
}

impl Grid {
    pub fn new(n: usize, box_length: f64) -> Result<Grid> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::Grid(format!("n = {n} must be even and >= 8")));
        }
        if !(box_length > 0.0) || !box_length.is_finite() {
            return Err(Error::Grid(format!("box length {box_length} must be positive")));
        }
        let h = box_length / n as f64;
        Ok(Grid { n, box_length, origin_offset: [0.5 * h; 3] })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn origin_offset(&self) -> [f64; 3] {
        self.origin_offset
    }

    pub fn h(&self) -> f64 {
        self.box_length / self.n as f64
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_volume(&self) -> f64 {
        self.h().powi(3)
    }

    /// Coordinate of sample `i` along `axis`.
    #[inline]
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        -0.5 * self.box_length + self.origin_offset[axis] + i as f64 * self.h()
    }

    /// Coordinates of every sample along one axis.
    pub fn axis(&self, axis: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.coord(axis, i)).collect()
    }

    #[inline]
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let n = self.n;
        let (ix, iy, iz) = (idx / (n * n), (idx / n) % n, idx % n);
        [self.coord(0, ix), self.coord(1, iy), self.coord(2, iz)]
    }

    pub fn min_radius(&self) -> f64 {
        let a = self.axis(0).iter().fold(f64::INFINITY, |m, &x| m.min(x.abs()));
        let b = self.axis(1).iter().fold(f64::INFINITY, |m, &x| m.min(x.abs()));
        let c = self.axis(2).iter().fold(f64::INFINITY, |m, &x| m.min(x.abs()));
        (a * a + b * b + c * c).sqrt()
    }

    pub fn dk(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.box_length
    }

    /// Signed integer frequency of FFT bin `i`, Nyquist included as `-n/2`.
    #[inline]
    pub fn freq(&self, i: usize) -> i64 {
        if i <= self.n / 2 - 1 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Wavenumber used by derivative symbols: the Nyquist bin is dropped.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> f64 {
        if i == self.n / 2 {
            0.0
        } else {
            self.freq(i) as f64 * self.dk()
        }
    }

    /// Derivative wavenumbers along a full axis.
    pub fn k_axis(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.wavenumber(i)).collect()
    }

    /// Derivative wavenumbers along the halved last axis of a real transform.
    pub fn k_half(&self) -> Vec<f64> {
        (0..self.n / 2 + 1).map(|i| self.wavenumber(i)).collect()
    }
}
