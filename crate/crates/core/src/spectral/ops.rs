//! Spectral differentiation and the polar-coordinate operators built from it.
//!
//! Polar quantities never touch a coordinate chart: with D = x·∇ and H the Hessian,
//! ∂_r f = Df/r, ∂_r² f = xᵀHx/r² and 𝛥̸f = Δf − ∂_r² f − (2/r)∂_r f.

use rustfft::num_complex::Complex64;

use super::field::{ScalarField, Spectrum};
use super::grid::Grid;
use crate::par::*;

/// Value, gradient and Hessian of a field at one point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub g: [f64; 3],
    pub h: [[f64; 3]; 3],
}

#[inline]
fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

impl Jet {
    #[inline]
    pub fn lap(&self) -> f64 {
        self.h[0][0] + self.h[1][1] + self.h[2][2]
    }

    #[inline]
    pub fn grad_sq(&self) -> f64 {
        dot(self.g, self.g)
    }

    /// x·∇f
    #[inline]
    pub fn euler(&self, x: [f64; 3]) -> f64 {
        dot(x, self.g)
    }

    #[inline]
    pub fn hx(&self, x: [f64; 3]) -> [f64; 3] {
        [dot(self.h[0], x), dot(self.h[1], x), dot(self.h[2], x)]
    }

    /// xᵀ H x
    #[inline]
    pub fn xhx(&self, x: [f64; 3]) -> f64 {
        dot(x, self.hx(x))
    }

    #[inline]
    pub fn dr(&self, x: [f64; 3]) -> f64 {
        self.euler(x) / dot(x, x).sqrt()
    }

    #[inline]
    pub fn drr(&self, x: [f64; 3]) -> f64 {
        self.xhx(x) / dot(x, x)
    }

    #[inline]
    pub fn slashed_lap(&self, x: [f64; 3]) -> f64 {
        let r2 = dot(x, x);
        (r2 * self.lap() - self.xhx(x) - 2.0 * self.euler(x)) / r2
    }

    /// |∇̸f|² = |∇f|² − (∂_r f)²
    #[inline]
    pub fn ang_grad_sq(&self, x: [f64; 3]) -> f64 {
        let e = self.euler(x);
        self.grad_sq() - e * e / dot(x, x)
    }

    /// ∇(∂_r f)
    #[inline]
    pub fn grad_dr(&self, x: [f64; 3]) -> [f64; 3] {
        let r2 = dot(x, x);
        let r = r2.sqrt();
        let e = self.euler(x);
        let hx = self.hx(x);
        let mut out = [0.0; 3];
        for i in 0..3 {
            out[i] = (self.g[i] + hx[i]) / r - e * x[i] / (r2 * r);
        }
        out
    }

    /// |∇̸∂_r f|² = |∇∂_r f|² − (∂_r² f)²
    #[inline]
    pub fn ang_grad_dr_sq(&self, x: [f64; 3]) -> f64 {
        let gd = self.grad_dr(x);
        let drr = self.drr(x);
        dot(gd, gd) - drr * drr
    }

    /// |∇̸²f|² from the projected Hessian ∇̸²f = PHP − (∂_r f/r)P, P = I − x̂x̂ᵀ.
    #[inline]
    pub fn slashed_hessian_sq(&self, x: [f64; 3]) -> f64 {
        let r2 = dot(x, x);
        let hx = self.hx(x);
        let php = self.hess_sq() - 2.0 * dot(hx, hx) / r2 + (dot(x, hx) / r2).powi(2);
        let tr = self.lap() - self.drr(x);
        let c = self.euler(x) / r2;
        php - 2.0 * c * tr + 2.0 * c * c
    }

    /// Frobenius norm² of the full Hessian.
    #[inline]
    pub fn hess_sq(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += self.h[i][j] * self.h[i][j];
            }
        }
        s
    }
}

#[inline]
fn ipow(k: f64, a: u32) -> f64 {
    match a {
        0 => 1.0,
        1 => k,
        2 => k * k,
        _ => k.powi(a as i32),
    }
}

/// Symbol of ∂^α: i^{|α|} k^α.
#[inline]
pub fn derivative_symbol(k: [f64; 3], alpha: [u32; 3]) -> Complex64 {
    let mag = ipow(k[0], alpha[0]) * ipow(k[1], alpha[1]) * ipow(k[2], alpha[2]);
    match (alpha[0] + alpha[1] + alpha[2]) % 4 {
        0 => Complex64::new(mag, 0.0),
        1 => Complex64::new(0.0, mag),
        2 => Complex64::new(-mag, 0.0),
        _ => Complex64::new(0.0, -mag),
    }
}

/// Exact derivative of the trigonometric interpolant.
pub fn spectral_derivative(f: &ScalarField, alpha: [u32; 3]) -> ScalarField {
    if alpha == [0, 0, 0] {
        return f.clone();
    }
    Spectrum::of(f).apply(|k| derivative_symbol(k, alpha)).into_field(f.time())
}

pub fn derivative_of_spectrum(s: &Spectrum, alpha: [u32; 3], t: f64) -> ScalarField {
    s.apply(|k| derivative_symbol(k, alpha)).into_field(t)
}

pub const UNIT: [[u32; 3]; 3] = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
/// Hessian entries in the order xx, xy, xz, yy, yz, zz.
pub const PAIRS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

pub fn gradient(f: &ScalarField) -> [ScalarField; 3] {
    let s = Spectrum::of(f);
    gradient_of_spectrum(&s, f.time())
}

pub fn gradient_of_spectrum(s: &Spectrum, t: f64) -> [ScalarField; 3] {
    [
        derivative_of_spectrum(s, UNIT[0], t),
        derivative_of_spectrum(s, UNIT[1], t),
        derivative_of_spectrum(s, UNIT[2], t),
    ]
}

pub fn laplacian(f: &ScalarField) -> ScalarField {
    aniso_laplacian(f, [1.0; 3])
}

/// Σ_j ε_j ∂_j² f
pub fn aniso_laplacian(f: &ScalarField, eps: [f64; 3]) -> ScalarField {
    Spectrum::of(f)
        .apply(|k| Complex64::new(-(eps[0] * k[0] * k[0] + eps[1] * k[1] * k[1] + eps[2] * k[2] * k[2]), 0.0))
        .into_field(f.time())
}

/// D f = x·∇f
pub fn euler(f: &ScalarField) -> ScalarField {
    let g = gradient(f);
    let grid = *f.grid();
    let data = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let x = grid.point(i);
            x[0] * g[0].data()[i] + x[1] * g[1].data()[i] + x[2] * g[2].data()[i]
        })
        .collect();
    ScalarField::new(grid, data, f.time()).expect("shape")
}

/// ∂_r f = (x·∇f)/r
pub fn radial_derivative(f: &ScalarField) -> ScalarField {
    euler(f).map_with_x(|x, v| v / dot(x, x).sqrt())
}

/// Value, gradient and Hessian at every lattice point.
#[derive(Debug, Clone)]
pub struct LatticeJets {
    grid: Grid,
    time: f64,
    v: Vec<f64>,
    g: [Vec<f64>; 3],
    h: [Vec<f64>; 6],
}

impl LatticeJets {
    pub fn of(f: &ScalarField) -> LatticeJets {
        let s = Spectrum::of(f);
        let t = f.time();
        let d = |a: [u32; 3]| derivative_of_spectrum(&s, a, t).into_data();
        let g = [d(UNIT[0]), d(UNIT[1]), d(UNIT[2])];
        let h = PAIRS.map(|(i, j)| {
            let mut a = [0u32; 3];
            a[i] += 1;
            a[j] += 1;
            d(a)
        });
        LatticeJets { grid: *f.grid(), time: t, v: f.data().to_vec(), g, h }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn jet(&self, i: usize) -> Jet {
        let h = &self.h;
        Jet {
            v: self.v[i],
            g: [self.g[0][i], self.g[1][i], self.g[2][i]],
            h: [
                [h[0][i], h[1][i], h[2][i]],
                [h[1][i], h[3][i], h[4][i]],
                [h[2][i], h[4][i], h[5][i]],
            ],
        }
    }

    /// Pointwise field built from (x, jet).
    pub fn map<F>(&self, f: F) -> ScalarField
    where
        F: Fn([f64; 3], &Jet) -> f64 + Sync,
    {
        let grid = self.grid;
        let data = (0..grid.len()).into_par_iter().map(|i| f(grid.point(i), &self.jet(i))).collect();
        ScalarField::new(grid, data, self.time).expect("shape")
    }
}

/// ∂_r² f = xᵀHx / r²
pub fn radial_second_derivative(f: &ScalarField) -> ScalarField {
    LatticeJets::of(f).map(|x, j| j.drr(x))
}

/// 𝛥̸f = Δf − ∂_r² f − (2/r)∂_r f
pub fn slashed_laplacian(f: &ScalarField) -> ScalarField {
    LatticeJets::of(f).map(|x, j| j.slashed_lap(x))
}

/// |∇̸f|² = |∇f|² − (∂_r f)²
pub fn angular_gradient_sq(f: &ScalarField) -> ScalarField {
    let g = gradient(f);
    let grid = *f.grid();
    let data = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let x = grid.point(i);
            let gv = [g[0].data()[i], g[1].data()[i], g[2].data()[i]];
            let e = dot(x, gv);
            dot(gv, gv) - e * e / dot(x, x)
        })
        .collect();
    ScalarField::new(grid, data, f.time()).expect("shape")
}
